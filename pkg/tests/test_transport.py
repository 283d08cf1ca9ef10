"""Path metrics, empirical Wasserstein and transportation constants."""

import itertools

import numpy as np
import pytest

from fbmlab.grid import TimeGrid
from fbmlab.transport import (
    PathEnsemble,
    PathMetric,
    TheoremTag,
    c_bt,
    pairwise_cost_matrix,
    path_distance,
    relative_entropy_discrete,
    transport_constant,
    wasserstein_empirical,
)


def test_path_distance_hand_values():
    grid = TimeGrid(1.0, 2)
    a = np.array([0.0, 0.0, 0.0])
    b = np.array([0.0, 1.0, 0.0])
    assert path_distance(a, b, grid, PathMetric.d_infinity) == 1.0
    # trapezoid of (0, 1, 0)^2 with dt = 1/2 -> 1/2
    assert path_distance(a, b, grid, PathMetric.d_two) == pytest.approx(
        np.sqrt(0.5))


def test_path_distance_shape_guard():
    grid = TimeGrid(1.0, 2)
    with pytest.raises(ValueError):
        path_distance(np.zeros(3), np.zeros(4), grid, PathMetric.d_two)


def test_wasserstein_matches_bruteforce_n4():
    rng = np.random.default_rng(8)
    grid = TimeGrid(1.0, 8)
    mu = PathEnsemble(grid, rng.standard_normal((4, 9)))
    nu = PathEnsemble(grid, rng.standard_normal((4, 9)))
    for p in (1, 2):
        for metric in PathMetric:
            cost = pairwise_cost_matrix(mu, nu, metric, p)
            best = min(
                np.mean([cost[i, perm[i]] for i in range(4)])
                for perm in itertools.permutations(range(4))
            )
            w = wasserstein_empirical(mu, nu, p, metric)
            assert w == pytest.approx(best ** (1.0 / p), abs=1e-9)


def test_wasserstein_zero_on_identical_ensembles():
    rng = np.random.default_rng(9)
    grid = TimeGrid(1.0, 8)
    paths = rng.standard_normal((6, 9))
    mu = PathEnsemble(grid, paths)
    nu = PathEnsemble(grid, paths.copy())
    assert wasserstein_empirical(mu, nu, 2, PathMetric.d_two) == pytest.approx(0.0)


def test_wasserstein_unequal_counts_lp():
    # a single-path target makes W1 the average distance to it
    rng = np.random.default_rng(10)
    grid = TimeGrid(1.0, 8)
    mu = PathEnsemble(grid, rng.standard_normal((5, 9)))
    nu = PathEnsemble(grid, rng.standard_normal((1, 9)))
    cost = pairwise_cost_matrix(mu, nu, PathMetric.d_infinity, 1)
    w = wasserstein_empirical(mu, nu, 1, PathMetric.d_infinity)
    assert w == pytest.approx(cost.mean(), abs=1e-10)


def test_wasserstein_sinkhorn_above_cutoff():
    # shifted copy of one ensemble: W2 under d_2 equals the shift exactly
    rng = np.random.default_rng(11)
    grid = TimeGrid(1.0, 8)
    base = rng.standard_normal((520, 9))
    mu = PathEnsemble(grid, base)
    nu = PathEnsemble(grid, base + 0.5)
    w = wasserstein_empirical(mu, nu, 2, PathMetric.d_two)
    assert w == pytest.approx(0.5, rel=1e-6)


def test_cost_matrix_rejects_nonfinite():
    grid = TimeGrid(1.0, 4)
    bad = np.zeros((2, 5))
    bad[0, 2] = np.inf
    mu = PathEnsemble(grid, bad)
    nu = PathEnsemble(grid, np.zeros((2, 5)))
    with pytest.raises(ValueError):
        pairwise_cost_matrix(mu, nu, PathMetric.d_infinity, 1)


def test_relative_entropy_values():
    assert relative_entropy_discrete([0.5, 0.5], [0.5, 0.5]) == 0.0
    val = relative_entropy_discrete([0.5, 0.5], [0.25, 0.75])
    exact = 0.5 * np.log(2.0) + 0.5 * np.log(2.0 / 3.0)
    assert val == pytest.approx(exact)


def test_relative_entropy_absolute_continuity():
    assert relative_entropy_discrete([0.5, 0.5, 0.0], [0.5, 0.0, 0.5]) == np.inf


def test_relative_entropy_validation():
    with pytest.raises(ValueError):
        relative_entropy_discrete([0.5, 0.6], [0.5, 0.5])
    with pytest.raises(ValueError):
        relative_entropy_discrete([0.5, 0.5], [0.7, 0.2])


def test_c_bt_both_signs():
    assert c_bt(-1.0, 1.0) == pytest.approx(1.0 - np.exp(-1.0))
    assert c_bt(2.0, 0.5, sigma1=1.0) == pytest.approx((np.exp(3.0) - 1.0) / 3.0)
    with pytest.raises(ValueError):
        c_bt(0.0, 1.0)


def test_transport_constant_t1_additive():
    tc = transport_constant("T1_additive", H=0.75, T=0.5,
                            K=2.0, sigma_beta_norm=1.5, L_b=1.0)
    assert tc.value == pytest.approx(2.0 * 1.5 * 0.5**1.5)
    assert tc.horizon_ok
    late = transport_constant("T1_additive", H=0.75, T=0.9,
                              K=2.0, sigma_beta_norm=1.5, L_b=1.0)
    assert not late.horizon_ok  # Delta = 1/2 < 0.9


def test_transport_constant_t2_additive_d2():
    tc = transport_constant(TheoremTag.T2_additive_d2, H=0.75, T=1.0,
                            B=-1.0, sigma_sup=2.0)
    expect = 2.0 * 0.75 * 4.0 * (1.0 - np.exp(-1.0))
    assert tc.value == pytest.approx(expect)


def test_transport_constant_t2_scalar_dinf_dissipative():
    # for B < 0 the exponential factor saturates at 1
    tc = transport_constant("T2_scalar_dinf", H=0.75, T=2.0,
                            B=-0.5, sigma1=1.0, sigma2=1.3)
    expect = 2.0 * 1.0 * 1.3**2 / 0.5 * 0.75 * 2.0**0.5
    assert tc.value == pytest.approx(expect)


def test_transport_constant_requires_parameters():
    with pytest.raises(ValueError):
        transport_constant("T2_additive_d2", H=0.75, T=1.0, sigma_sup=1.0)  # no B
    with pytest.raises(ValueError):
        transport_constant("T1_additive", H=0.75, T=0.5, K=1.0)  # incomplete
