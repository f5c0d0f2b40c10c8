import numpy as np
import pytest

from app.core.degseq_models import DegreeDistribution
from app.core.rde import (
    SamplePool,
    parse_t_grid,
    phi_of_t,
    predicted_load_cdf,
    rde_update,
    rho_of_mu,
    solve_fixed_point,
)

D3 = DegreeDistribution.regular(3)
SMALL = dict(size=2000, samples=20_000)


def test_update_small_cases():
    biased = D3.size_biased()
    half = rde_update(SamplePool.constant(0.5, 1000), biased, 1.5, seed=1)
    assert np.allclose(half.values, 0.5)
    assert half.generation == 1
    zero = rde_update(SamplePool.constant(0.0, 1000), DegreeDistribution.poisson(2.0), 1.0, seed=1)
    assert np.all(zero.values == 0)
    one = rde_update(SamplePool.constant(1.0, 1000), biased, 1.0, seed=1)
    assert np.all(one.values == 1)


def test_pool_validation():
    with pytest.raises(ValueError):
        SamplePool.constant(0.5, 10)
    with pytest.raises(ValueError):
        SamplePool(np.full(1000, 1.5))


def test_updates_stay_in_unit_interval(rng):
    biased = DegreeDistribution.poisson(3.0).size_biased()
    pool = SamplePool(rng.random(2000))
    for _ in range(5):
        pool = rde_update(pool, biased, 0.7, rng)
        assert pool.values.min() >= 0 and pool.values.max() <= 1


def test_fixed_point_small_cases():
    top = solve_fixed_point(D3, 1.5, size=1000, init="delta1", seed=1)
    assert top.converged and np.all(top.pool.values == 1)
    for t in (1.5, 1.6):
        bottom = solve_fixed_point(D3, t, size=1000, init="delta0", seed=1)
        assert bottom.converged and np.all(bottom.pool.values == 0)
    with pytest.raises(ValueError):
        solve_fixed_point(D3, 1.0, size=1000, init="middle")


def test_iterates_from_zero_increase_stochastically():
    dist = DegreeDistribution.poisson(2.0)
    biased = dist.size_biased()
    rng = np.random.default_rng(5)
    pool = SamplePool.constant(0.0, 5000)
    means = []
    for _ in range(15):
        pool = rde_update(pool, biased, 0.6, rng)
        means.append(pool.values.mean())
    assert all(b >= a - 3 / np.sqrt(5000) for a, b in zip(means, means[1:]))


def test_phi_closed_forms():
    at_one = phi_of_t(D3, 1.0, seed=2, **SMALL)
    assert at_one.phi == pytest.approx(0.5, abs=0.01)
    assert at_one.branch == "delta1"
    above = phi_of_t(D3, 1.6, seed=2, **SMALL)
    assert above.phi == pytest.approx(0.0, abs=0.005)
    assert above.branch == "delta0"
    assert above.to_dict()["branch"] == "delta0"


def test_phi_below_zero_is_half_mean_minus_t():
    dist = DegreeDistribution.poisson(2.0)
    est = phi_of_t(dist, -0.5, seed=3, **SMALL)
    assert est.phi == pytest.approx(dist.mean / 2 + 0.5, abs=1e-9)


def test_phi_is_non_increasing():
    dist = DegreeDistribution.poisson(2.0)
    ests = [phi_of_t(dist, t, seed=4, size=5000, samples=50_000) for t in (0.25, 0.75, 1.25, 1.75)]
    for a, b in zip(ests, ests[1:]):
        assert b.phi <= a.phi + 5 * (a.stderr + b.stderr) + 0.02


def test_rho_of_mu_small_cases():
    assert rho_of_mu(D3, size=1000, samples=10_000, tol_t=0.01, seed=1) == pytest.approx(1.5, abs=0.02)
    assert rho_of_mu(DegreeDistribution.regular(1), size=1000, samples=10_000, tol_t=0.01, seed=1) == pytest.approx(0.5, abs=0.02)
    assert rho_of_mu(DegreeDistribution.regular(0)) == 0.0
    assert rho_of_mu(DegreeDistribution.regular(2), size=1000, samples=10_000, tol_t=0.01, seed=1) >= 0.98


def test_predicted_curve_for_regular_law():
    grid = [-0.5, 0.5, 1.2, 1.5, 1.6, 2.5]
    curve = predicted_load_cdf(D3, grid, seed=1, **SMALL)
    assert curve.tail.tolist() == [1.0, 1.0, 1.0, 0.0, 0.0, 0.0]
    frame = curve.to_frame()
    assert list(frame.columns) == ["t", "phi", "phi_stderr", "tail", "tail_stderr", "branch"]
    assert np.all(np.diff(curve.tail) <= 0)


def test_parse_t_grid():
    assert parse_t_grid("0:1:0.25").tolist() == [0.0, 0.25, 0.5, 0.75]
    assert parse_t_grid("1.5,0.5").tolist() == [1.5, 0.5]
    with pytest.raises(ValueError):
        parse_t_grid("0:1:0")


def test_iterates_from_one_decrease_stochastically():
    biased = DegreeDistribution.poisson(2.0).size_biased()
    rng = np.random.default_rng(6)
    pool = SamplePool.constant(1.0, 5000)
    grid = np.linspace(0.05, 0.95, 10)
    noise = 3 / np.sqrt(5000)
    for _ in range(15):
        nxt = rde_update(pool, biased, 1.8, rng)
        assert np.all(nxt.cdf(grid) >= pool.cdf(grid) - noise)
        assert nxt.values.mean() <= pool.values.mean() + noise
        pool = nxt
    assert pool.values.mean() < 1.0


def test_phi_is_convex():
    dist = DegreeDistribution.poisson(2.0)
    ests = [phi_of_t(dist, t, seed=7, size=5000, samples=50_000) for t in (0.3, 0.8, 1.3, 1.8, 2.3)]
    for a, b, c in zip(ests, ests[1:], ests[2:]):
        slack = 5 * (a.stderr + 2 * b.stderr + c.stderr) + 0.03
        assert a.phi - 2 * b.phi + c.phi >= -slack


def test_phi_slope_matches_predicted_tail():
    dist = DegreeDistribution.poisson(2.0)
    curve = predicted_load_cdf(dist, [0.3, 0.8, 1.3, 1.8], size=5000, samples=50_000, seed=8, workers=1)
    step = 0.5
    for i in range(len(curve.t) - 1):
        slope = -(curve.phi[i + 1] - curve.phi[i]) / step
        slack = 5 * (curve.phi_stderr[i] + curve.phi_stderr[i + 1]) / step + 5 * (curve.tail_stderr[i] + curve.tail_stderr[i + 1]) + 0.03
        # the mean of the tail over [t_i, t_i+1] sits between its endpoint values
        assert curve.tail[i + 1] - slack <= slope <= curve.tail[i] + slack
