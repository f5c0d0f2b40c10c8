"""Exact loads on finite trees through response-function recursions.

For an oriented tree edge ``(i, j)`` let ``T_{i->j}`` be the component of
``i`` once the edge is removed, rooted at ``i``. Its response function maps a
baseload injected at ``i`` to the total level at ``i``. The module works with
the (right-continuous) inverse responses, which satisfy

    limit:  g_{i->j} = Id + sum_k clip(g_{k->i} - 1, -1, 0)
    eps:    g_{i->j} = Id + sum_k clip((g_{k->i}^{-1} + eps (2 Id - 1))^{-1} - 1, -1, 0)

over the children ``k`` of ``i`` away from ``j``; a leaf has ``g = Id``.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.graph import Graph
from app.core.piecewise import PiecewiseLinearFn
from app.utils.config import settings
from app.utils.exceptions import NotATreeError

logger = logging.getLogger(__name__)

Message = Tuple[int, Optional[int]]
Combine = Callable[[List[PiecewiseLinearFn]], PiecewiseLinearFn]


def _require_forest(tree: Graph) -> None:
    if not tree.is_forest():
        raise NotATreeError(f"{tree!r} contains a cycle")


def _limit_term(g: PiecewiseLinearFn) -> PiecewiseLinearFn:
    return g.shift(-1).clip(-1, 0)


def _eps_term(g: PiecewiseLinearFn, eps) -> PiecewiseLinearFn:
    tilted = g.inverse() + PiecewiseLinearFn.affine(2 * eps, -eps)
    return tilted.inverse().shift(-1).clip(-1, 0)


def _combiner(exact: bool, eps=None) -> Combine:
    identity = PiecewiseLinearFn.identity(exact)
    if eps is not None and exact:
        eps = Fraction(str(eps))

    def combine(children: List[PiecewiseLinearFn]) -> PiecewiseLinearFn:
        out = identity
        for g in children:
            out = out + (_limit_term(g) if eps is None else _eps_term(g, eps))
        return out.capped(settings.MAX_BREAKPOINTS)

    return combine


class _MessageTable:
    """Inverse responses for every oriented edge of a forest, computed on demand."""

    def __init__(self, tree: Graph, combine: Combine):
        self.tree = tree
        self.combine = combine
        self.cache: Dict[Message, PiecewiseLinearFn] = {}

    def get(self, i: int, j: Optional[int]) -> PiecewiseLinearFn:
        # iterative post-order so deep paths do not hit the recursion limit
        stack: List[Tuple[int, Optional[int], bool]] = [(i, j, False)]
        while stack:
            a, b, expanded = stack.pop()
            if (a, b) in self.cache:
                continue
            children = [int(k) for k in self.tree.neighbors(a) if k != b]
            if expanded:
                self.cache[(a, b)] = self.combine([self.cache[(k, a)] for k in children])
                continue
            stack.append((a, b, True))
            stack.extend((k, a, False) for k in children if (k, a) not in self.cache)
        return self.cache[(i, j)]


def _check_edge(tree: Graph, root_edge: Sequence[Optional[int]]) -> Message:
    i, j = root_edge
    if not 0 <= i < tree.n:
        raise ValueError(f"vertex {i} not in tree")
    if j is not None and tree.slot(i, j) is None:
        raise ValueError(f"({i}, {j}) is not an edge of the tree")
    return int(i), (None if j is None else int(j))


def response_inverse_limit(tree: Graph, root_edge: Sequence[Optional[int]], exact: bool = True) -> PiecewiseLinearFn:
    """Inverse limiting response of ``T_{i->j}``; ``j=None`` roots the whole component at ``i``."""
    _require_forest(tree)
    i, j = _check_edge(tree, root_edge)
    return _MessageTable(tree, _combiner(exact)).get(i, j)


def response_inverse_eps(tree: Graph, root_edge: Sequence[Optional[int]], eps: float, exact: bool = True) -> PiecewiseLinearFn:
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    _require_forest(tree)
    i, j = _check_edge(tree, root_edge)
    return _MessageTable(tree, _combiner(exact, eps)).get(i, j)


def response_function_eps(tree: Graph, root_edge: Sequence[Optional[int]], eps: float, exact: bool = True) -> PiecewiseLinearFn:
    """The epsilon response itself: baseload at the root -> total level at the root."""
    return response_inverse_eps(tree, root_edge, eps, exact).inverse()


def exact_tree_loads(tree: Graph, exact: bool = True) -> np.ndarray:
    """Balanced loads of a forest, vertex by vertex.

    The load at ``o`` is ``sup{t : t + sum_i clip(g_{i->o}(t) - 1, -1, 0) < 0}``.
    In exact mode the entries are ``Fraction`` objects.
    """
    _require_forest(tree)
    table = _MessageTable(tree, _combiner(exact))
    zero = Fraction(0) if exact else 0.0
    loads = np.empty(tree.n, dtype=object if exact else float)
    for o in range(tree.n):
        if not tree.degrees[o]:
            loads[o] = zero
            continue
        loads[o] = table.get(o, None).crossing(zero)
    if any(table.cache[key].coarsened for key in table.cache):
        logger.warning("Breakpoint cap reached; tree loads are approximate")
    return loads


def check_response_laws(f: PiecewiseLinearFn, degree: int, grid: Sequence[float], tol: float = 1e-9) -> List[str]:
    """Names of the response-function laws violated on ``grid`` (empty when all hold)."""
    xs = sorted(float(x) for x in grid)
    values = [float(f(x)) for x in xs]
    failed = []
    steps = list(zip(xs, xs[1:], values, values[1:]))
    if any(fy < fx - tol for _, _, fx, fy in steps):
        failed.append("monotone")
    if any(fy - fx > (y - x) + tol for x, y, fx, fy in steps):
        failed.append("non-expansive")
    if any(v - x < -tol or v - x > degree + tol for x, v in zip(xs, values)):
        failed.append("coercive")
    return failed


@dataclass
class CavityMarks:
    graph: Graph
    xi: np.ndarray  # one mark per oriented slot
    t: float
    converged: bool
    sweeps: int
    residual: float

    def mark(self, i: int, j: int) -> float:
        return float(self.xi[self.graph.slot(i, j)])

    def incoming(self) -> np.ndarray:
        """sum_k xi(k, i) at every vertex i."""
        return np.bincount(self.graph.slot_head, weights=self.xi, minlength=self.graph.n)

    def break_equivalence(self, tol: float = 1e-12) -> List[Tuple[int, int]]:
        """Edges where ``min(incoming) > t`` and ``xi(i,j) + xi(j,i) > 1`` disagree."""
        inc = self.incoming()
        u, v = self.graph.edges[:, 0], self.graph.edges[:, 1]
        lhs = np.minimum(inc[u], inc[v]) > self.t + tol
        pair = self.xi[0::2] + self.xi[1::2]
        rhs = pair > 1 + tol
        bad = np.flatnonzero(lhs != rhs)
        return [tuple(e) for e in self.graph.edges[bad].tolist()]


def cavity_messages(g: Graph, t: float, max_sweeps: int = 10_000, tol: float = 1e-12) -> CavityMarks:
    """Synchronous iteration of ``xi(i,j) = clip(1 - t + sum_{k != j} xi(k,i), 0, 1)`` from zero."""
    xi = np.zeros(2 * g.m)
    tail, head = g.slot_tail, g.slot_head
    residual = 0.0
    for sweep in range(1, max_sweeps + 1):
        total = np.bincount(head, weights=xi, minlength=g.n)
        new = np.clip(1.0 - t + total[tail] - xi[np.arange(2 * g.m) ^ 1], 0.0, 1.0)
        residual = float(np.abs(new - xi).max()) if g.m else 0.0
        xi = new
        if residual <= tol:
            return CavityMarks(g, xi, t, True, sweep, residual)
    logger.warning(f"Cavity iteration at t={t} stopped after {max_sweeps} sweeps (residual {residual:.2e})")
    return CavityMarks(g, xi, t, False, max_sweeps, residual)


def cavity_marks_from_responses(tree: Graph, t: float) -> CavityMarks:
    """Marks ``xi(i,j) = clip(1 - g_{i->j}(t), 0, 1)`` read off the limiting inverse responses."""
    _require_forest(tree)
    table = _MessageTable(tree, _combiner(exact=False))
    xi = np.array(
        [
            min(max(1.0 - float(table.get(int(a), int(b))(float(t))), 0.0), 1.0)
            for a, b in zip(tree.slot_tail, tree.slot_head)
        ]
    )
    return CavityMarks(tree, xi, t, True, 0, 0.0)
