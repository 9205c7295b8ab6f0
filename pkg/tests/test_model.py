"""Tests for path samplers, Malliavin weights, and simulation clouds."""

import numpy as np
import pytest
from scipy import stats

from mwls.errors import NumericalError
from mwls.grid import make_theta_grid
from mwls.model import (
    brownian_model,
    cloud_rng,
    derive_seed,
    euler_sde_model,
    gbm_model,
    load_cloud,
    sample_cloud,
    sample_marginal,
    save_cloud,
)

# ---------------------------------------------------------------------------
# random streams


def test_cloud_rng_reproducible_and_disjoint():
    a1 = cloud_rng(7, 3).standard_normal(8)
    a2 = cloud_rng(7, 3).standard_normal(8)
    b = cloud_rng(7, 4).standard_normal(8)
    c = cloud_rng(7, 3, purpose=1).standard_normal(8)
    np.testing.assert_array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(a1, c)


def test_derive_seed_deterministic_and_distinct():
    assert derive_seed(11, 0) == derive_seed(11, 0)
    assert derive_seed(11, 0) != derive_seed(11, 1)
    assert derive_seed(11, 0) != derive_seed(12, 0)


# ---------------------------------------------------------------------------
# clouds: determinism, stream separation, shapes


def test_cloud_bitwise_determinism():
    model = brownian_model(d=2)
    grid = make_theta_grid(T=1.0, N=5, theta=1.0)
    c1 = sample_cloud(model, grid, i=1, M_i=64, seed=42)
    c2 = sample_cloud(model, grid, i=1, M_i=64, seed=42)
    np.testing.assert_array_equal(c1.X, c2.X)
    np.testing.assert_array_equal(c1.H, c2.H)


def test_cloud_shapes_and_indexing():
    model = brownian_model(d=3)
    grid = make_theta_grid(T=2.0, N=6, theta=1.0)
    cloud = sample_cloud(model, grid, i=2, M_i=10, seed=1)
    assert cloud.M == 10
    assert cloud.X.shape == (10, 5, 3)  # X_2..X_6
    assert cloud.H.shape == (10, 4, 3)  # H^(2)_3..H^(2)_6
    np.testing.assert_array_equal(cloud.x_at(2), cloud.X[:, 0, :])
    np.testing.assert_array_equal(cloud.x_at(6), cloud.X[:, 4, :])
    np.testing.assert_array_equal(cloud.h_at(3), cloud.H[:, 0, :])
    with pytest.raises(ValueError):
        cloud.x_at(1)
    with pytest.raises(ValueError):
        cloud.h_at(2)


def test_clouds_at_distinct_indices_use_disjoint_streams():
    model = brownian_model(d=1)
    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    c0 = sample_cloud(model, grid, i=0, M_i=1000, seed=9)
    c1 = sample_cloud(model, grid, i=1, M_i=1000, seed=9)
    # Same terminal index, but generated from different streams.
    assert not np.array_equal(c0.x_at(4), c1.x_at(4))


def test_cloud_independence_correlation():
    model = brownian_model(d=1)
    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    m = 40_000
    a = sample_cloud(model, grid, i=1, M_i=m, seed=5)
    b = sample_cloud(model, grid, i=3, M_i=m, seed=5)
    r = np.corrcoef(a.x_at(4)[:, 0], b.x_at(4)[:, 0])[0, 1]
    assert abs(r) <= 4.0 / np.sqrt(m)


def test_cloud_validation():
    model = brownian_model(d=1)
    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    with pytest.raises(ValueError):
        sample_cloud(model, grid, i=4, M_i=10, seed=0)
    with pytest.raises(ValueError):
        sample_cloud(model, grid, i=-1, M_i=10, seed=0)
    with pytest.raises(ValueError):
        sample_cloud(model, grid, i=0, M_i=0, seed=0)


# ---------------------------------------------------------------------------
# Brownian model


def test_brownian_terminal_law():
    model = brownian_model(d=1)
    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    cloud = sample_cloud(model, grid, i=0, M_i=10_000, seed=13)
    stat = stats.kstest(cloud.x_at(4)[:, 0], "norm", args=(0.0, 1.0))
    assert stat.pvalue > 0.01


def test_brownian_weight_moments():
    model = brownian_model(d=2)
    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    m = 100_000
    cloud = sample_cloud(model, grid, i=1, M_i=m, seed=21)
    for j in (2, 4):
        h = cloud.h_at(j)
        span = grid.points[j] - grid.points[1]
        mean = h.mean(axis=0)
        std = h.std(axis=0)
        assert np.all(np.abs(mean) <= 4.0 * std / np.sqrt(m))
        second = np.mean(np.sum(h**2, axis=1))
        target = model.q / span
        assert second <= (1.05**2) * target
        assert second >= (0.95**2) * target


def test_brownian_with_drift_and_start_box():
    model = brownian_model(d=1, drift=2.0, x0=1.0, x0_width=0.5)
    grid = make_theta_grid(T=1.0, N=2, theta=1.0)
    cloud = sample_cloud(model, grid, i=0, M_i=50_000, seed=3)
    x0 = cloud.x_at(0)[:, 0]
    assert np.all(np.abs(x0 - 1.0) <= 0.25)
    stat = stats.kstest(x0, "uniform", args=(0.75, 0.5))
    assert stat.pvalue > 0.01
    # Terminal mean = 1 + drift * T.
    xT = cloud.x_at(2)[:, 0]
    assert abs(xT.mean() - 3.0) <= 4.0 * xT.std() / np.sqrt(50_000)


# ---------------------------------------------------------------------------
# geometric Brownian model


def test_gbm_terminal_mean():
    model = gbm_model(mu=0.3, sigma=0.4, x0=1.0)
    grid = make_theta_grid(T=1.0, N=5, theta=1.0)
    cloud = sample_cloud(model, grid, i=0, M_i=100_000, seed=17)
    xT = cloud.x_at(5)[:, 0]
    target = np.exp(0.3)
    assert abs(xT.mean() - target) <= 4.0 * xT.std() / np.sqrt(100_000)


def test_gbm_weights_are_brownian_increment_weights():
    grid = make_theta_grid(T=1.0, N=3, theta=1.0)
    g = sample_cloud(gbm_model(mu=0.1, sigma=0.5, x0=2.0), grid, i=0, M_i=500, seed=8)
    b = sample_cloud(brownian_model(d=1, x0=2.0), grid, i=0, M_i=500, seed=8)
    np.testing.assert_array_equal(g.H, b.H)


def test_gbm_degenerates_to_constant_for_tiny_vol():
    model = gbm_model(mu=0.0, sigma=1e-12, x0=1.5)
    grid = make_theta_grid(T=1.0, N=3, theta=1.0)
    cloud = sample_cloud(model, grid, i=0, M_i=100, seed=2)
    np.testing.assert_allclose(cloud.X, 1.5, atol=1e-9)


def test_gbm_validation():
    with pytest.raises(ValueError):
        gbm_model(sigma=0.0)
    with pytest.raises(ValueError):
        gbm_model(sigma=[0.2, -0.1], d=2)


# ---------------------------------------------------------------------------
# Euler SDE model


def _identity_sigma(t, x):
    m, d = x.shape
    return np.broadcast_to(np.eye(d), (m, d, d))


def test_euler_identity_diffusion_matches_brownian():
    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    for d in (1, 2):
        e = sample_cloud(
            euler_sde_model(b=None, sigma=_identity_sigma, x0=0.0, d=d),
            grid, i=1, M_i=300, seed=31,
        )
        b = sample_cloud(brownian_model(d=d), grid, i=1, M_i=300, seed=31)
        np.testing.assert_allclose(e.X, b.X, rtol=0.0, atol=0.0)
        np.testing.assert_allclose(e.H, b.H, rtol=1e-12, atol=1e-12)


def test_euler_linear_sde_weights():
    # dX = a X dW: the tangent process is X_k / X_i exactly in the Euler
    # scheme, the integrand collapses to 1, and the weights coincide with
    # the Brownian-increment weights.
    a = 0.1

    def sigma(t, x):
        return (a * x)[:, :, None]

    def dsigma(t, x):
        return np.full((x.shape[0], 1, 1, 1), a)

    grid = make_theta_grid(T=1.0, N=5, theta=1.0)
    e = sample_cloud(
        euler_sde_model(b=None, sigma=sigma, x0=1.0, dsigma=dsigma),
        grid, i=1, M_i=2000, seed=77,
    )
    b = sample_cloud(brownian_model(d=1, x0=1.0), grid, i=1, M_i=2000, seed=77)
    np.testing.assert_allclose(e.H, b.H, rtol=1e-10)


def test_euler_linear_sde_weight_moments():
    a = 0.1

    def sigma(t, x):
        return (a * x)[:, :, None]

    def dsigma(t, x):
        return np.full((x.shape[0], 1, 1, 1), a)

    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    m = 100_000
    cloud = sample_cloud(
        euler_sde_model(b=None, sigma=sigma, x0=1.0, dsigma=dsigma),
        grid, i=0, M_i=m, seed=19,
    )
    for j in (1, 4):
        h = cloud.h_at(j)[:, 0]
        span = grid.points[j]
        assert abs(h.mean()) <= 4.0 * h.std() / np.sqrt(m)
        assert np.mean(h**2) <= (1.05**2) / span


def test_euler_singular_sigma_reported_with_location():
    def sigma(t, x):
        return np.zeros((x.shape[0], 1, 1))

    grid = make_theta_grid(T=1.0, N=3, theta=1.0)
    with pytest.raises(NumericalError, match="time index 0"):
        sample_cloud(
            euler_sde_model(b=None, sigma=sigma, x0=1.0), grid, i=0, M_i=10, seed=0
        )


def test_euler_drift_only_path():
    def b(t, x):
        return np.ones_like(x)

    def sigma(t, x):
        return 1e-12 * _identity_sigma(t, x)

    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    cloud = sample_cloud(
        euler_sde_model(b=b, sigma=sigma, x0=0.0), grid, i=0, M_i=50, seed=4
    )
    # X_t = t up to the negligible diffusion.
    np.testing.assert_allclose(
        cloud.X[:, :, 0], np.broadcast_to(grid.points, (50, 5)), atol=1e-9
    )


# ---------------------------------------------------------------------------
# Markov property surrogate


def test_markov_property_brownian():
    grid = make_theta_grid(T=1.0, N=3, theta=1.0)
    m = 5000
    direct = sample_cloud(brownian_model(d=1), grid, i=0, M_i=m, seed=51)
    other = sample_cloud(brownian_model(d=1), grid, i=0, M_i=m, seed=52)
    rng = np.random.default_rng(53)
    span = grid.points[2] - grid.points[1]
    rebuilt = other.x_at(1)[:, 0] + np.sqrt(span) * rng.standard_normal(m)
    stat = stats.ks_2samp(direct.x_at(2)[:, 0], rebuilt)
    assert stat.pvalue > 0.01


def test_markov_property_gbm():
    mu, sig = 0.2, 0.3
    grid = make_theta_grid(T=1.0, N=3, theta=1.0)
    m = 5000
    model = gbm_model(mu=mu, sigma=sig, x0=1.0)
    direct = sample_cloud(model, grid, i=0, M_i=m, seed=61)
    other = sample_cloud(model, grid, i=0, M_i=m, seed=62)
    rng = np.random.default_rng(63)
    span = grid.points[2] - grid.points[1]
    rebuilt = other.x_at(1)[:, 0] * np.exp(
        (mu - 0.5 * sig**2) * span + sig * np.sqrt(span) * rng.standard_normal(m)
    )
    stat = stats.ks_2samp(direct.x_at(2)[:, 0], rebuilt)
    assert stat.pvalue > 0.01


# ---------------------------------------------------------------------------
# marginals


def test_sample_marginal_matches_cloud_law():
    model = brownian_model(d=1)
    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    marg = sample_marginal(model, grid, i=2, M=5000, seed=71)
    cloud = sample_cloud(model, grid, i=2, M_i=5000, seed=72)
    stat = stats.ks_2samp(marg[:, 0], cloud.x_at(2)[:, 0])
    assert stat.pvalue > 0.01


def test_sample_marginal_start_box():
    model = brownian_model(d=1, x0=0.0, x0_width=5.0)
    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    marg = sample_marginal(model, grid, i=0, M=5000, seed=73)
    assert np.all(np.abs(marg) <= 2.5)
    stat = stats.kstest(marg[:, 0], "uniform", args=(-2.5, 5.0))
    assert stat.pvalue > 0.01


def test_sample_marginal_validation():
    model = brownian_model(d=1)
    grid = make_theta_grid(T=1.0, N=4, theta=1.0)
    with pytest.raises(ValueError):
        sample_marginal(model, grid, i=5, M=10, seed=0)
    with pytest.raises(ValueError):
        sample_marginal(model, grid, i=0, M=0, seed=0)


# ---------------------------------------------------------------------------
# dump / restore


def test_cloud_roundtrip(tmp_path):
    model = brownian_model(d=2)
    grid = make_theta_grid(T=1.0, N=5, theta=0.7)
    cloud = sample_cloud(model, grid, i=2, M_i=33, seed=81)
    path = str(tmp_path / "cloud.bin")
    save_cloud(cloud, path)
    back = load_cloud(path, seed=81)
    assert back.i == 2
    assert back.seed == 81
    np.testing.assert_array_equal(back.X, cloud.X)
    np.testing.assert_array_equal(back.H, cloud.H)


def test_cloud_load_rejects_garbage(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"not a cloud table")
    with pytest.raises(ValueError, match="not a cloud table"):
        load_cloud(str(path))


def test_cloud_load_rejects_truncation(tmp_path):
    model = brownian_model(d=1)
    grid = make_theta_grid(T=1.0, N=3, theta=1.0)
    cloud = sample_cloud(model, grid, i=0, M_i=10, seed=1)
    path = tmp_path / "cloud.bin"
    save_cloud(cloud, str(path))
    data = path.read_bytes()
    path.write_bytes(data[:-16])
    with pytest.raises(ValueError, match="truncated"):
        load_cloud(str(path))


# ---------------------------------------------------------------------------
# model validation


def test_model_validation():
    with pytest.raises(ValueError):
        brownian_model(d=0)
    with pytest.raises(ValueError):
        brownian_model(d=2, x0=[1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        brownian_model(d=1, x0_width=-1.0)
