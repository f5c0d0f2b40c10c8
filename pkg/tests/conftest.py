import os

# Celery runs in-process during tests
os.environ.setdefault("CELERY_BROKER_URL", "memory://")
os.environ.setdefault("CELERY_RESULT_BACKEND", "cache+memory://")
os.environ.setdefault("BALANCED_LOADS_CELERY_ALWAYS_EAGER", "1")

import numpy as np
import pytest

from app.core.graph import Graph


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def regular_tree(d: int, height: int) -> Graph:
    """Root and internal vertices of degree d, leaves at depth ``height``."""
    edges, frontier, n = [], [0], 1
    for _ in range(height):
        nxt = []
        for parent in frontier:
            for _ in range(d if parent == 0 else d - 1):
                edges.append((parent, n))
                nxt.append(n)
                n += 1
        frontier = nxt
    return Graph.from_edges(n, edges)


def random_small_graph(rng: np.random.Generator, n_max: int = 12) -> Graph:
    n = int(rng.integers(2, n_max + 1))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    p = rng.uniform(0.1, 0.7)
    return Graph.from_edges(n, [e for e in pairs if rng.random() < p])


def random_tree(rng: np.random.Generator, n: int) -> Graph:
    return Graph.from_edges(n, [(int(rng.integers(0, i)), i) for i in range(1, n)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def triangle_pendant():
    return Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])


@pytest.fixture
def p3():
    return path_graph(3)
