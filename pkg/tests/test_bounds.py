import math

import numpy as np
import pytest

from app.core.bounds import (
    MomentParams,
    binomial_bound,
    count_dense_subsets,
    DENSE_COUNT_COLUMNS,
    dense_count_table,
    expected_dense_count_bound,
    mc_dense_counts,
    mc_within_set_edges,
    z_delta_t_bound,
)
from app.core.degseq_models import DegreeSequence, random_regular_graph
from app.utils.exceptions import BoundError
from tests.conftest import complete_graph


def regular_sequence(d: int, n: int) -> DegreeSequence:
    return DegreeSequence(np.full(n, d))


def test_binomial_bound_small_cases():
    pair = DegreeSequence(np.array([1, 1]))
    dom = binomial_bound(pair, [0, 1])
    assert (dom.s, dom.mean) == (2, 4.0)
    empty = binomial_bound(pair, [])
    assert (empty.s, empty.mean) == (0, 0.0)
    with pytest.raises(ValueError):
        binomial_bound(DegreeSequence(np.zeros(3)), [0])


def test_binomial_domination_monte_carlo():
    d = regular_sequence(3, 20)
    S = range(5)
    dom = binomial_bound(d, S)
    samples = 10_000
    z = mc_within_set_edges(d, S, samples, seed=9)
    for r in range(1, 6):
        p_hat = np.mean(z >= r)
        stderr = math.sqrt(max(p_hat * (1 - p_hat), 1e-12) / samples)
        assert p_hat <= dom.tail(r) + 3 * stderr


def test_dense_count_bound_closed_form():
    pair = DegreeSequence(np.array([1, 1]))
    b = expected_dense_count_bound(pair, 2, 1, 1.0)
    assert b.bound == pytest.approx(2 * math.e**4)
    assert b.log_bound == pytest.approx(math.log(2) + 4)


def test_dense_count_bound_grid_minimum():
    d = regular_sequence(3, 50)
    grid = [0.25, 0.5, 1.0, 2.0]
    best = expected_dense_count_bound(d, 4, 6, theta_grid=grid)
    for th in grid:
        assert best.log_bound <= expected_dense_count_bound(d, 4, 6, th).log_bound
    assert best.theta in grid


def test_dense_count_bound_formula_monotonicity():
    base = regular_sequence(3, 30)
    extra_vertex = DegreeSequence(np.append(base.d, 0))
    assert expected_dense_count_bound(extra_vertex, 3, 3).log_bound > expected_dense_count_bound(base, 3, 3).log_bound
    with pytest.raises(ValueError):
        expected_dense_count_bound(base, 0, 3)


def test_dense_count_bound_dominates_monte_carlo():
    d = regular_sequence(3, 12)
    for k in (2, 3):
        mc = mc_dense_counts(d, k, [1, 2, 3], samples=2000, seed=k)
        for r, (mean, stderr) in mc.items():
            assert mean <= expected_dense_count_bound(d, k, r).bound + 3 * stderr


def test_large_bound_is_reported_in_log_space():
    d = regular_sequence(3, 1000)
    b = expected_dense_count_bound(d, 200, 1, 1.0)
    assert b.bound == math.inf
    assert math.isfinite(b.log_bound)


def test_moment_params():
    p = MomentParams.from_sequence(regular_sequence(3, 10), 1.0)
    assert p.alpha == 3.0
    assert p.lam == pytest.approx(math.e**3)
    with pytest.raises(ValueError):
        MomentParams.from_sequence(regular_sequence(3, 10), 0.0)


def test_z_bound_spot_value_and_halving():
    d = regular_sequence(3, 200)
    z = z_delta_t_bound(d, 2.0, 1.0)
    assert z.f(0.01) == pytest.approx(2**3 * math.e * math.e**3 * 0.01)
    assert z.f(z.delta / 2) == pytest.approx(z.f(z.delta) / 2)
    assert z.f_delta < 1 <= z.f(2 * z.delta)
    assert z.delta == 2.0**-9
    assert z.bound >= 0


def test_z_bound_errors():
    d = regular_sequence(3, 50)
    with pytest.raises(ValueError):
        z_delta_t_bound(d, 1.0)
    with pytest.raises(BoundError):
        z_delta_t_bound(d, 1.0 + 1e-9, theta=0.01, max_halvings=5)


def test_z_bound_at_large_n():
    d = regular_sequence(3, 200)
    z = z_delta_t_bound(d, 3.0, 1.0, n=10**9)
    assert 1 <= z.split <= z.delta * 10**9
    assert 0 < z.bound < 1
    assert z.kappa == pytest.approx(z.bound / (math.log(10**9) / 10**9) ** 2)


def test_certified_delta_has_no_dense_subsets():
    z = z_delta_t_bound(regular_sequence(3, 200), 2.0, 1.0)
    size = int(z.delta * 200)
    # delta = 2^-9 certifies no set size at n = 200, so the bound is exactly zero there
    assert size == 0 and z.split == 0 and z.bound == 0.0
    # three vertices hold at most three edges, never 2|S|
    size = 3
    for seed in range(100):
        g = random_regular_graph(3, 200, seed=seed)
        assert count_dense_subsets(g, 2.0, size) == 0


def test_count_dense_subsets():
    k4 = complete_graph(4)
    assert count_dense_subsets(k4, 1.5, 4) == 1
    assert count_dense_subsets(k4, 1.0, 4) == 5
    assert count_dense_subsets(k4, 1.0, 3) == 4


def test_dense_count_table_pairs_bound_with_monte_carlo():
    d = regular_sequence(3, 12)
    table = dense_count_table(d, [2, 3], [1, 2, 3], samples=2000, seed=4)
    assert list(table.columns) == DENSE_COUNT_COLUMNS
    assert len(table) == 6
    assert table[["k", "r"]].values.tolist() == [[2, 1], [2, 2], [2, 3], [3, 1], [3, 2], [3, 3]]
    assert (table["mc_mean"] <= table["bound"] + 3 * table["mc_stderr"]).all()
    first = table.iloc[0]
    assert first["bound"] == pytest.approx(expected_dense_count_bound(d, 2, 1).bound)


def test_dense_count_table_without_samples_leaves_mc_empty():
    table = dense_count_table(regular_sequence(3, 50), [4], [6, 8], theta_grid=[0.5, 1.0])
    assert table["mc_mean"].isna().all() and table["mc_stderr"].isna().all()
    assert set(table["theta"]) <= {0.5, 1.0}
    # more internal edges are rarer
    assert table["log_bound"].iloc[1] < table["log_bound"].iloc[0]
