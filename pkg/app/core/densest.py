"""Maximum subgraph density, density decomposition and k-orientability.

Flow networks follow one layout: a source, one node per edge, one node per
vertex and a sink, stored as a scipy csr matrix. Edge nodes feed both
endpoints through arcs no minimum cut can afford, so the source side of a
minimum cut is always closed under edges.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, maximum_flow

from app.core.graph import Graph
from app.utils.config import settings
from app.utils.exceptions import InputTooLargeError

logger = logging.getLogger(__name__)

SOURCE, SINK = 0, 1


@dataclass
class DensityResult:
    rho: Fraction
    H: List[int]

    def to_dict(self) -> dict:
        return {"rho_num": self.rho.numerator, "rho_den": self.rho.denominator, "H": list(self.H)}


@dataclass
class Block:
    vertices: List[int]
    density: Fraction


@dataclass
class DensityDecomposition:
    n: int
    blocks: List[Block] = field(default_factory=list)

    @property
    def assignment(self) -> np.ndarray:
        out = np.full(self.n, -1, dtype=np.int64)
        for k, block in enumerate(self.blocks):
            out[block.vertices] = k
        return out

    def loads(self) -> List[Fraction]:
        """Exact balanced load of every vertex (its block density)."""
        out = [Fraction(0)] * self.n
        for block in self.blocks:
            for v in block.vertices:
                out[v] = block.density
        return out

    def to_dict(self) -> dict:
        return {
            "blocks": [
                {
                    "density_num": b.density.numerator,
                    "density_den": b.density.denominator,
                    "vertices": list(b.vertices),
                }
                for b in self.blocks
            ]
        }


def _subset_masks(n: int) -> np.ndarray:
    return np.arange(1, 1 << n, dtype=np.int64)


def bruteforce_maximizers(g: Graph) -> Tuple[Fraction, List[List[int]]]:
    """Exact maximum density and every vertex set attaining it."""
    if g.n > settings.BRUTEFORCE_MAX_N:
        raise InputTooLargeError(f"brute force limited to {settings.BRUTEFORCE_MAX_N} vertices, got {g.n}")
    if g.n == 0:
        return Fraction(0), [[]]
    masks = _subset_masks(g.n)
    sizes = np.zeros(len(masks), dtype=np.int64)
    for i in range(g.n):
        sizes += (masks >> i) & 1
    inside = np.zeros(len(masks), dtype=np.int64)
    for u, v in g.edges.tolist():
        inside += ((masks >> u) & 1) & ((masks >> v) & 1)
    dens = inside / sizes
    near = np.flatnonzero(dens >= dens.max() - 1e-9)
    rho = max(Fraction(int(inside[k]), int(sizes[k])) for k in near)
    best = near[inside[near] * rho.denominator == rho.numerator * sizes[near]]
    sets = [[i for i in range(g.n) if (int(masks[k]) >> i) & 1] for k in best]
    return rho, sets


def rho_bruteforce(g: Graph) -> DensityResult:
    rho, sets = bruteforce_maximizers(g)
    union = sorted(set().union(*map(set, sets)))
    return DensityResult(rho, union)


class _CutNetwork:
    """Fixed csr layout of the flow network of ``g``; only capacities change between solves."""

    def __init__(self, g: Graph, credit: Optional[np.ndarray] = None):
        n, m = g.n, g.m
        self.g = g
        self.credit = np.zeros(n, dtype=np.int64) if credit is None else np.asarray(credit, dtype=np.int64)
        self.size = 2 + m + n
        self.edge_node = 2 + np.arange(m)
        self.vertex_node = 2 + m + np.arange(n)
        self.credited = np.flatnonzero(self.credit)
        u, v = g.edges[:, 0], g.edges[:, 1]
        tails = np.concatenate(
            [np.full(m, SOURCE), self.edge_node, self.edge_node, np.full(len(self.credited), SOURCE), self.vertex_node]
        )
        heads = np.concatenate(
            [self.edge_node, self.vertex_node[u], self.vertex_node[v], self.vertex_node[self.credited], np.full(n, SINK)]
        )
        layout = sp.coo_matrix(
            (np.arange(1, len(tails) + 1, dtype=np.int64), (tails, heads)), shape=(self.size, self.size)
        ).tocsr()
        self._order = layout.data - 1
        self._layout = layout

    def solve(self, supply: int, demand: int) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
        """Max flow with ``supply`` into every edge node and ``demand`` out of every vertex node.

        Endpoint arcs carry ``supply + 1`` so no minimum cut separates an edge
        node from its endpoints.
        """
        m = self.g.m
        caps = np.concatenate(
            [
                np.full(m, supply, dtype=np.int64),
                np.full(2 * m, supply + 1, dtype=np.int64),
                supply * self.credit[self.credited],
                np.full(self.g.n, demand, dtype=np.int64),
            ]
        )
        net = self._layout.copy()
        net.data = caps[self._order]
        return net, maximum_flow(net, SOURCE, SINK).flow

    def source_side(self, net: sp.csr_matrix, flow: sp.csr_matrix) -> List[int]:
        """Vertices that cannot reach the sink in the residual network (the largest min cut)."""
        residual = (net - flow).tocsr()
        residual.data = (residual.data > 0).astype(np.int8)
        residual.eliminate_zeros()
        reach = breadth_first_order(residual.T.tocsr(), SINK, directed=True, return_predecessors=False)
        cut = np.ones(self.size, dtype=bool)
        cut[reach] = False
        return np.flatnonzero(cut[self.vertex_node]).tolist()


def _densest_with_credit(g: Graph, credit: np.ndarray) -> Tuple[Fraction, List[int]]:
    """Largest H maximising (|E(H)| + credit(H)) / |H| by a Dinkelbach iteration.

    Each round solves max_H q (|E(H)| + credit(H)) - p |H| for the current
    candidate p / q with one max-flow; a positive optimum yields a denser set.
    """
    total = g.m + int(credit.sum())
    if total == 0:
        return Fraction(0), list(range(g.n))
    network = _CutNetwork(g, credit)
    rho = Fraction(total, g.n)
    while True:
        p, q = rho.numerator, rho.denominator
        H = network.source_side(*network.solve(q, p))
        weight = g.edges_within(H) + int(credit[H].sum())
        if q * weight - p * len(H) == 0:
            return rho, H
        rho = Fraction(weight, len(H))
        logger.debug(f"Density candidate raised to {rho} on {len(H)} vertices")


def rho_maxflow(g: Graph) -> DensityResult:
    if g.n == 0:
        return DensityResult(Fraction(0), [])
    rho, H = _densest_with_credit(g, np.zeros(g.n, dtype=np.int64))
    return DensityResult(rho, H)


def density_decomposition(g: Graph) -> DensityDecomposition:
    """Peel largest densest sets; edges from a later set into earlier blocks count for the later set."""
    out = DensityDecomposition(g.n)
    remaining = np.arange(g.n)
    removed = np.zeros(g.n, dtype=bool)
    while len(remaining):
        sub, old = g.induced(remaining)
        credit = np.zeros(len(old), dtype=np.int64)
        if g.m:
            u, v = g.edges[:, 0], g.edges[:, 1]
            towards = np.concatenate([u[removed[v] & ~removed[u]], v[removed[u] & ~removed[v]]])
            position = np.full(g.n, -1, dtype=np.int64)
            position[old] = np.arange(len(old))
            np.add.at(credit, position[towards], 1)
        rho, H = _densest_with_credit(sub, credit)
        block = sorted(int(old[h]) for h in H)
        out.blocks.append(Block(block, rho))
        removed[block] = True
        remaining = np.flatnonzero(~removed)
    logger.info(f"Density decomposition of {g!r}: {len(out.blocks)} blocks")
    return out


def mean_excess_curve(loads: Sequence[float], t_grid: Iterable[float]) -> np.ndarray:
    """(1/n) sum_o (load(o) - t)^+ on each grid point."""
    l = np.asarray(loads, dtype=float)
    t = np.asarray(list(t_grid), dtype=float)
    if not len(l):
        return np.zeros(len(t))
    return np.maximum(l[None, :] - t[:, None], 0.0).mean(axis=1)


def subset_dual_value(g: Graph, S: Iterable[int], t: float) -> float:
    S = list(S)
    return (g.edges_within(S) - t * len(S)) / g.n


@dataclass
class OrientationResult:
    orientable: bool
    orientation: Optional[List[Tuple[int, int]]] = None  # (tail, head), head receives the edge
    violating_set: Optional[List[int]] = None


def k_orientable(g: Graph, k: int) -> OrientationResult:
    """Orientation with every in-degree at most k, or a set H with |E(H)| > k |H|.

    Uses the Hakimi condition: such an orientation exists iff |E(H)| <= k |H| for all H.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if not g.m:
        return OrientationResult(True, orientation=[])
    if k == 0:
        return OrientationResult(False, violating_set=list(range(g.n)))
    network = _CutNetwork(g)
    net, flow = network.solve(1, k)
    if int(flow[SOURCE].sum()) == g.m:
        u, v = g.edges[:, 0], g.edges[:, 1]
        to_u = np.asarray(flow[network.edge_node, network.vertex_node[u]]).ravel() > 0
        heads = np.where(to_u, u, v)
        tails = np.where(to_u, v, u)
        return OrientationResult(True, orientation=list(zip(tails.tolist(), heads.tolist())))
    return OrientationResult(False, violating_set=network.source_side(net, flow))
