"""Finite simple graphs with oriented-edge indexing, truncation and edge-list I/O.

Undirected edge ``e = (u, v)`` owns the oriented slots ``2e`` (u -> v) and
``2e + 1`` (v -> u); reversal of a slot is ``slot ^ 1``.
"""
import logging
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import networkx as nx
import numpy as np

from app.utils.exceptions import GraphFormatError

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^#\s*n\s*=\s*(\d+)\s*$")


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    edges: np.ndarray  # (m, 2) int64, one row per undirected edge

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        if len(arr):
            if arr.min() < 0 or arr.max() >= n:
                raise ValueError(f"edge endpoint out of range for n={n}")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise ValueError("self-loops are not allowed")
            key = np.sort(arr, axis=1)
            if len(np.unique(key, axis=0)) != len(key):
                raise ValueError("duplicate edges are not allowed")
        arr.setflags(write=False)
        return cls(n=n, edges=arr)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls.from_edges(n, np.zeros((0, 2), dtype=np.int64))

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @cached_property
    def slot_tail(self) -> np.ndarray:
        """Tail vertex of every oriented slot."""
        out = np.empty(2 * self.m, dtype=np.int64)
        out[0::2] = self.edges[:, 0]
        out[1::2] = self.edges[:, 1]
        return out

    @cached_property
    def slot_head(self) -> np.ndarray:
        out = np.empty(2 * self.m, dtype=np.int64)
        out[0::2] = self.edges[:, 1]
        out[1::2] = self.edges[:, 0]
        return out

    @staticmethod
    def reverse(slot: int) -> int:
        return slot ^ 1

    @cached_property
    def _csr(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        # adjacency of i lists (neighbor, slot of i -> neighbor)
        order = np.argsort(self.slot_tail, kind="stable")
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        return indptr, self.slot_head[order], order

    @cached_property
    def adjacency(self) -> List[List[Tuple[int, int]]]:
        indptr, nbrs, slots = self._csr
        return [
            list(zip(nbrs[indptr[i]:indptr[i + 1]].tolist(), slots[indptr[i]:indptr[i + 1]].tolist()))
            for i in range(self.n)
        ]

    def neighbors(self, i: int) -> np.ndarray:
        indptr, nbrs, _ = self._csr
        return nbrs[indptr[i]:indptr[i + 1]]

    @cached_property
    def edge_index(self) -> Dict[Tuple[int, int], int]:
        return {(min(u, v), max(u, v)): e for e, (u, v) in enumerate(self.edges.tolist())}

    def slot(self, i: int, j: int) -> Optional[int]:
        """Oriented slot of (i -> j), or None when {i, j} is not an edge."""
        e = self.edge_index.get((min(i, j), max(i, j)))
        if e is None:
            return None
        return 2 * e if int(self.edges[e, 0]) == i else 2 * e + 1

    def edge_set(self) -> frozenset:
        return frozenset(self.edge_index)

    def subgraph(self, edge_mask: np.ndarray) -> "Graph":
        """Same vertex set, edges where ``edge_mask`` is true."""
        return Graph.from_edges(self.n, self.edges[np.asarray(edge_mask, dtype=bool)])

    def induced(self, vertices: Iterable[int]) -> Tuple["Graph", np.ndarray]:
        """Induced subgraph relabelled to 0..k-1, with the map new -> old."""
        keep = np.zeros(self.n, dtype=bool)
        idx = np.fromiter(vertices, dtype=np.int64)
        keep[idx] = True
        old = np.flatnonzero(keep)
        new_of = np.full(self.n, -1, dtype=np.int64)
        new_of[old] = np.arange(len(old))
        mask = keep[self.edges[:, 0]] & keep[self.edges[:, 1]] if self.m else np.zeros(0, dtype=bool)
        return Graph.from_edges(len(old), new_of[self.edges[mask]]), old

    def without_vertices(self, vertices: Iterable[int]) -> Tuple["Graph", np.ndarray]:
        drop = set(int(v) for v in vertices)
        return self.induced(i for i in range(self.n) if i not in drop)

    def edges_within(self, vertices: Iterable[int]) -> int:
        inside = np.zeros(self.n, dtype=bool)
        inside[np.fromiter(vertices, dtype=np.int64)] = True
        if not self.m:
            return 0
        return int(np.count_nonzero(inside[self.edges[:, 0]] & inside[self.edges[:, 1]]))

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.edges.tolist())
        return G

    def components(self) -> List[List[int]]:
        return [sorted(c) for c in nx.connected_components(self.to_networkx())]

    def is_tree(self) -> bool:
        return self.n >= 1 and self.m == self.n - 1 and nx.is_connected(self.to_networkx())

    def is_forest(self) -> bool:
        return nx.is_forest(self.to_networkx()) if self.n else True

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def truncate(g: Graph, delta: int) -> Graph:
    """Isolate every vertex of degree > delta (degrees measured in ``g``)."""
    if delta < 0:
        raise ValueError(f"truncation degree must be non-negative, got {delta}")
    if not g.m:
        return g
    deg = g.degrees
    mask = np.maximum(deg[g.edges[:, 0]], deg[g.edges[:, 1]]) <= delta
    return g.subgraph(mask)


def load_edge_list(stream: TextIO) -> Graph:
    """Parse the toolkit's edge-list format.

    One ``u v`` pair per line, ``#`` comments, optional ``# n=<int>`` header
    allowing isolated trailing vertices.
    """
    header_n: Optional[int] = None
    edges: List[Tuple[int, int]] = []
    seen: Dict[Tuple[int, int], int] = {}
    max_id, max_line = -1, None
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            match = _HEADER.match(line)
            if match:
                header_n = int(match.group(1))
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'u v', got {line!r}", line_no)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"vertex ids must be integers, got {line!r}", line_no)
        if u < 0 or v < 0:
            raise GraphFormatError(f"vertex ids must be non-negative, got {line!r}", line_no)
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", line_no)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"duplicate edge {key} (first seen on line {seen[key]})", line_no)
        seen[key] = line_no
        edges.append((u, v))
        if max(u, v) > max_id:
            max_id, max_line = max(u, v), line_no
    n = max_id + 1
    if header_n is not None:
        if header_n < n:
            raise GraphFormatError(f"header n={header_n} but vertex id {max_id} present", max_line)
        n = header_n
    logger.debug(f"Parsed edge list: n={n}, m={len(edges)}")
    return Graph.from_edges(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))


def write_edge_list(g: Graph, stream: TextIO) -> None:
    stream.write(f"# n={g.n}\n")
    for u, v in g.edges.tolist():
        stream.write(f"{u} {v}\n")
