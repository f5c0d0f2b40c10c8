"""Balanced and epsilon-balanced allocations.

An allocation stores one value per undirected edge ``e = (u, v)``: the share
``theta(u, v)`` of the edge's unit mass that lands on ``v``. The reverse
share is ``1 - theta(u, v)``, so ``theta(i, j) + theta(j, i) = 1`` holds by
construction.

The epsilon-balanced allocation with baseload ``b`` is the fixed point of
``theta(i, j) = clip(1/2 + (b_i + load_i - b_j - load_j) / (2 eps), 0, 1)``.
It is also the unique minimiser of ``1/2 sum (b + load)^2 + eps/2 sum theta^2``
over oriented edges, which gives a convex merit function on the vertex loads
and lets us solve it with a semismooth Newton method.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy import integrate, stats
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve

from app.core.graph import Graph, truncate
from app.utils.config import settings
from app.utils.exceptions import ConvergenceError

logger = logging.getLogger(__name__)

_BISECTION_STEPS = 64
_ARMIJO = 1e-4
_MIN_STEP = 1e-12


@dataclass(frozen=True, eq=False)
class Allocation:
    graph: Graph
    x: np.ndarray  # theta along slot 2e, i.e. mass of edge e sent to edges[e, 1]

    def __post_init__(self):
        if self.x.shape != (self.graph.m,):
            raise ValueError(f"allocation has {self.x.shape[0]} values for {self.graph.m} edges")

    @property
    def slot_values(self) -> np.ndarray:
        out = np.empty(2 * self.graph.m)
        out[0::2] = self.x
        out[1::2] = 1.0 - self.x
        return out

    def theta(self, i: int, j: int) -> float:
        s = self.graph.slot(i, j)
        if s is None:
            return 0.0
        return float(self.x[s >> 1]) if s % 2 == 0 else float(1.0 - self.x[s >> 1])

    def triples(self) -> List[Tuple[int, int, float]]:
        """Both orientations of every edge as (tail, head, theta)."""
        return list(
            zip(self.graph.slot_tail.tolist(), self.graph.slot_head.tolist(), self.slot_values.tolist())
        )

    def to_dict(self) -> Dict[str, list]:
        return {"loads": load_of(self.graph, self).tolist(), "theta": [list(t) for t in self.triples()]}


@dataclass
class BalanceCheck:
    ok: bool
    violations: List[Tuple[int, int]] = field(default_factory=list)


def load_of(g: Graph, a: Allocation) -> np.ndarray:
    if a.x.shape != (g.m,):
        raise ValueError(f"allocation size {a.x.shape[0]} does not match {g.m} edges")
    if not g.m:
        return np.zeros(g.n)
    return (
        np.bincount(g.edges[:, 1], weights=a.x, minlength=g.n)
        + np.bincount(g.edges[:, 0], weights=1.0 - a.x, minlength=g.n)
    )


def is_balanced(g: Graph, a: Allocation, tol: float = 1e-9) -> BalanceCheck:
    if tol <= 0:
        raise ValueError("tol must be positive")
    loads = load_of(g, a)
    theta = a.slot_values
    tail, head = g.slot_tail, g.slot_head
    bad = np.flatnonzero((loads[tail] < loads[head] - tol) & (theta > tol))
    violations = list(zip(tail[bad].tolist(), head[bad].tolist()))
    return BalanceCheck(ok=not violations, violations=violations)


def _clip_share(diff: np.ndarray, eps: float) -> np.ndarray:
    return np.clip(0.5 + diff / (2.0 * eps), 0.0, 1.0)


def _push(g: Graph, f: np.ndarray, eps: float) -> np.ndarray:
    """Loads produced by the clamped update applied to total levels ``f``."""
    x = _clip_share(f[g.edges[:, 0]] - f[g.edges[:, 1]], eps)
    return (
        np.bincount(g.edges[:, 1], weights=x, minlength=g.n)
        + np.bincount(g.edges[:, 0], weights=1.0 - x, minlength=g.n)
    )


def _merit(g: Graph, b: np.ndarray, load: np.ndarray, eps: float) -> float:
    s = (b + load)[g.edges[:, 0]] - (b + load)[g.edges[:, 1]]
    c = np.where(s <= -eps, 0.0, np.where(s >= eps, s, (s + eps) ** 2 / (4.0 * eps)))
    return float(0.5 * load @ load + c.sum() - load[g.edges[:, 0]].sum())


def _line_search(g: Graph, b: np.ndarray, load: np.ndarray, residual: np.ndarray, direction: np.ndarray, eps: float):
    """Backtracking along ``direction``; None when no admissible step exists above ``_MIN_STEP``."""
    psi = _merit(g, b, load, eps)
    slope = float(residual @ direction)
    alpha = 1.0
    while alpha >= _MIN_STEP:
        trial = load + alpha * direction
        trial_residual = trial - _push(g, b + trial, eps)
        # the merit is convex along the ray and its derivative there is residual . direction
        if float(trial_residual @ direction) <= 0.0 or _merit(g, b, trial, eps) <= psi + _ARMIJO * alpha * slope:
            return trial, trial_residual
        alpha *= 0.5
    return None


def _newton(
    g: Graph, b: np.ndarray, load: np.ndarray, eps: float, tol: float, max_steps: int, fallback_sweeps: int
) -> Tuple[np.ndarray, int]:
    u, v = g.edges[:, 0], g.edges[:, 1]
    eye = sp.identity(g.n, format="csr")
    residual = load - _push(g, b + load, eps)
    norm = float(np.abs(residual).max())
    for step in range(max_steps):
        if norm <= tol:
            return load, step
        f = b + load
        free = np.abs(f[u] - f[v]) < eps
        fu, fv = u[free], v[free]
        w = np.full(len(fu), 1.0 / (2.0 * eps))
        adj = sp.coo_matrix(
            (np.concatenate([w, w]), (np.concatenate([fu, fv]), np.concatenate([fv, fu]))), shape=(g.n, g.n)
        ).tocsr()
        jac = eye + sp.diags(np.asarray(adj.sum(axis=1)).ravel()) - adj
        direction = -np.atleast_1d(spsolve(jac.tocsc(), residual))
        accepted = _line_search(g, b, load, residual, direction, eps)
        if accepted is None:
            logger.warning(
                f"Newton line search stalled at eps={eps:g} after {step} steps (residual {norm:.3e}); "
                f"continuing with Jacobi sweeps"
            )
            return _jacobi(g, b, load, eps, tol, fallback_sweeps)
        load, residual = accepted
        norm = float(np.abs(residual).max())
    if norm <= tol:
        return load, max_steps
    logger.warning(
        f"Newton at eps={eps:g} left residual {norm:.3e} after {max_steps} steps; continuing with Jacobi sweeps"
    )
    return _jacobi(g, b, load, eps, tol, fallback_sweeps)


def _jacobi(g: Graph, b: np.ndarray, load: np.ndarray, eps: float, tol: float, max_sweeps: int) -> Tuple[np.ndarray, int]:
    tail, head = g.slot_tail, g.slot_head
    deg = g.degrees.astype(float)
    rate = g.max_degree / (g.max_degree + 2.0 * eps)
    f = b + load
    change = np.inf
    for sweep in range(1, max_sweeps + 1):
        # each vertex solves y = b_o + sum_i c(f_i - y) against the previous iterate
        lo, hi = b.copy(), b + deg
        f_tail = f[tail]
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            inflow = np.bincount(head, weights=_clip_share(f_tail - mid[head], eps), minlength=g.n)
            above = mid - b - inflow > 0
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
        new_f = 0.5 * (lo + hi)
        change = float(np.abs(new_f - f).max())
        f = new_f
        if change * rate / (1.0 - rate) <= tol:
            return f - b, sweep
    raise ConvergenceError(f"Jacobi sweeps at eps={eps:g} did not converge", change, max_sweeps)


def _solve_loads(g: Graph, b: np.ndarray, eps: float, tol: float, max_sweeps: int, method: str, start: Optional[np.ndarray] = None) -> Tuple[np.ndarray, int]:
    load = g.degrees / 2.0 if start is None else start.astype(float)
    if method == "newton":
        return _newton(g, b, load, eps, tol, min(max_sweeps, settings.MAX_NEWTON_STEPS), max_sweeps)
    if method == "jacobi":
        return _jacobi(g, b, load, eps, tol, max_sweeps)
    raise ValueError(f"unknown method {method!r}, expected 'newton' or 'jacobi'")


def _allocation_from_levels(g: Graph, f: np.ndarray, eps: float) -> Allocation:
    return Allocation(g, _clip_share(f[g.edges[:, 0]] - f[g.edges[:, 1]], eps))


def epsilon_balance_baseload(
    g: Graph,
    b: Sequence[float],
    eps: float,
    tol: float = settings.EPS_TOL,
    max_sweeps: int = settings.MAX_SWEEPS,
    method: str = "newton",
    start: Optional[np.ndarray] = None,
) -> Allocation:
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    base = np.asarray(b, dtype=float)
    if base.shape != (g.n,) or not np.all(np.isfinite(base)):
        raise ValueError(f"baseload must be {g.n} finite values")
    if not g.m:
        return Allocation(g, np.zeros(0))
    load, steps = _solve_loads(g, base, eps, tol, max_sweeps, method, start)
    logger.debug(f"eps={eps:g} solved by {method} in {steps} steps")
    return _allocation_from_levels(g, base + load, eps)


def epsilon_balance(
    g: Graph,
    eps: float,
    delta: Optional[int] = None,
    tol: float = settings.EPS_TOL,
    max_sweeps: int = settings.MAX_SWEEPS,
    method: str = "newton",
) -> Allocation:
    """Epsilon-balanced allocation of ``g`` or of its truncation at ``delta``.

    With truncation the returned allocation lives on the truncated graph; the
    removed edges carry no mass at either endpoint.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    h = g if delta is None else truncate(g, delta)
    return epsilon_balance_baseload(h, np.zeros(h.n), eps, tol=tol, max_sweeps=max_sweeps, method=method)


def _frozen_limit(g: Graph, load: np.ndarray, eps: float) -> Optional[Tuple[np.ndarray, Allocation]]:
    """Send eps to 0 with the free/saturated edge pattern of ``load`` held fixed.

    Returns the limiting loads and a balanced allocation realising them, or
    None when the pattern is not yet the limiting one.
    """
    u, v = g.edges[:, 0], g.edges[:, 1]
    s = load[u] - load[v]
    free = np.abs(s) < eps
    to_v, to_u = ~free & (s > 0), ~free & (s < 0)
    n = g.n
    sat = np.bincount(v[to_v], minlength=n) + np.bincount(u[to_u], minlength=n)
    c = sat + 0.5 * (np.bincount(u[free], minlength=n) + np.bincount(v[free], minlength=n))
    adj = sp.coo_matrix((np.ones(int(free.sum())), (u[free], v[free])), shape=(n, n)).tocsr()
    adj = adj + adj.T
    _, labels = connected_components(adj, directed=False)
    target = (np.bincount(labels, weights=c) / np.bincount(labels))[labels]
    slack = 1e-9
    if np.any(target[v[to_v]] > target[u[to_v]] + slack) or np.any(target[u[to_u]] > target[v[to_u]] + slack):
        return None
    # free edges carry theta = 1/2 + (p_u - p_v) / 2 with L_free p = 2 (c - target)
    roots = np.unique(labels, return_index=True)[1]
    ground = np.zeros(n)
    ground[roots] = 1.0
    lap = sp.diags(np.asarray(adj.sum(axis=1)).ravel() + ground) - adj
    p = np.atleast_1d(spsolve(lap.tocsc(), 2.0 * (c - target)))
    theta = 0.5 + (p[u] - p[v]) / 2.0
    if np.any(free & ((theta < -slack) | (theta > 1.0 + slack))):
        return None
    x = np.where(free, np.clip(theta, 0.0, 1.0), to_v.astype(float))
    return target, Allocation(g, x)


def exact_loads(
    g: Graph,
    tol: float = settings.EXACT_TOL,
    eps0: float = settings.EPS0,
    max_levels: int = 80,
) -> Tuple[np.ndarray, Allocation]:
    """Balanced loads as the limit of the halving schedule eps_k = eps0 / 2^k.

    Each level is warm-started from the previous one. The eps -> 0 limit of the
    current free/saturated pattern is read off at every level; the schedule
    stops once two consecutive levels agree to within tol / 2.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not g.m:
        return np.zeros(g.n), Allocation(g, np.zeros(0))
    zero = np.zeros(g.n)
    load, previous = None, None
    change = np.inf
    for level in range(max_levels):
        eps = eps0 * 2.0 ** (-level)
        # rounding in the clamped update scales like 1/eps
        inner_tol = max(min(settings.EPS_TOL, tol * 1e-2), 1e-15 * (g.max_degree + 1) / eps)
        load, _ = _solve_loads(g, zero, eps, inner_tol, settings.MAX_SWEEPS, "newton", load)
        limit = _frozen_limit(g, load, eps)
        if limit is None:
            previous = None
            continue
        if previous is not None:
            change = float(np.abs(limit[0] - previous).max())
            if change < tol / 2:
                logger.info(f"Balanced loads on {g!r} settled at eps={eps:.3g} after {level + 1} levels")
                return load_of(g, limit[1]), limit[1]
        previous = limit[0]
    raise ConvergenceError("eps schedule did not settle", change, max_levels)


def fixed_point_residual(g: Graph, a: Allocation, eps: float, b: Optional[Sequence[float]] = None) -> float:
    if not g.m:
        return 0.0
    f = load_of(g, a) + (0.0 if b is None else np.asarray(b, dtype=float))
    target = _clip_share(f[g.edges[:, 0]] - f[g.edges[:, 1]], eps)
    return float(np.abs(a.x - target).max())


def random_allocation(g: Graph, rng: np.random.Generator) -> Allocation:
    return Allocation(g, rng.random(g.m))


def convex_order_gap(loads: np.ndarray, other_loads: np.ndarray, t_grid: Sequence[float]) -> Dict[str, object]:
    """sum f(loads) - sum f(other_loads) for f = square and f = (. - t)^+."""
    t = np.asarray(t_grid, dtype=float)
    excess = lambda l: np.maximum(np.asarray(l)[None, :] - t[:, None], 0.0).sum(axis=1)
    return {
        "square": float(np.sum(np.square(loads)) - np.sum(np.square(other_loads))),
        "excess": excess(loads) - excess(other_loads),
    }


class EmpiricalLoadDistribution:
    """Uniform mixture of point masses at the per-vertex loads."""

    def __init__(self, loads: Sequence[float]):
        self.values = np.sort(np.asarray(loads, dtype=float))

    def __len__(self) -> int:
        return len(self.values)

    def cdf(self, x) -> np.ndarray:
        if not len(self.values):
            return np.zeros_like(np.asarray(x, dtype=float))
        return np.searchsorted(self.values, x, side="right") / len(self.values)

    def tail(self, x) -> np.ndarray:
        return 1.0 - self.cdf(x)

    def atoms(self) -> List[Tuple[float, float]]:
        vals, counts = np.unique(self.values, return_counts=True)
        return list(zip(vals.tolist(), (counts / len(self.values)).tolist()))

    def kolmogorov(self, other: "EmpiricalLoadDistribution") -> float:
        return float(stats.ks_2samp(self.values, other.values).statistic)

    def wasserstein(self, other: "EmpiricalLoadDistribution") -> float:
        return float(stats.wasserstein_distance(self.values, other.values))

    def kolmogorov_to_curve(self, t_grid: Sequence[float], tail: Sequence[float]) -> float:
        """Sup distance between the empirical tail and a predicted tail on a grid."""
        return float(np.abs(self.tail(np.asarray(t_grid, dtype=float)) - np.asarray(tail, dtype=float)).max())

    def wasserstein_to_curve(self, t_grid: Sequence[float], tail: Sequence[float]) -> float:
        """Integral of |tail difference| over the grid (trapezoid rule)."""
        t = np.asarray(t_grid, dtype=float)
        return float(integrate.trapezoid(np.abs(self.tail(t) - np.asarray(tail, dtype=float)), t))


def empirical_load_distribution(loads: Sequence[float]) -> EmpiricalLoadDistribution:
    return EmpiricalLoadDistribution(loads)
