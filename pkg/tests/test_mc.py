"""Sampler reproducibility, distributional identities, and calibration.

Statistical assertions use a 4-standard-error band (or the KS quantile at
level 1e-3) with fixed seeds, so they are deterministic reruns, not flaky
random tests.
"""

import math

import numpy as np
import pytest
from scipy.special import erfc

from stablepow import (
    calibrate_exponent,
    density_sampler_gof,
    ks_threshold,
    quantile_Z,
    sample_M,
    sample_X,
    sample_Z,
    verify_identity,
)
from stablepow.density import stable_cdf_batch


def test_z_chunking_is_bit_exact():
    full = sample_Z(0.7, 1000, seed=5)
    head = sample_Z(0.7, 400, seed=5, start=0)
    tail = sample_Z(0.7, 600, seed=5, start=400)
    assert np.array_equal(full.values, np.concatenate([head.values, tail.values]))
    assert full.meta == "philox2x64:Z:alpha=0.7:start=0"


def test_m_and_x_chunking_are_bit_exact():
    for fn, args in ((sample_M, (0.6,)), (sample_X, (0.6, 2.0))):
        full = fn(*args, 500, seed=9)
        parts = [fn(*args, 125, seed=9, start=0).values,
                 fn(*args, 375, seed=9, start=125).values]
        assert np.array_equal(full.values, np.concatenate(parts))


def test_reruns_are_identical_and_seeds_differ():
    a = sample_Z(0.4, 256, seed=11).values
    b = sample_Z(0.4, 256, seed=11).values
    c = sample_Z(0.4, 256, seed=12).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_streams_are_separated():
    # Z and X consume different Philox streams under the same seed, and
    # M reuses the Z draws (M = Z * L^(1/alpha) with the same block)
    z = sample_Z(0.5, 512, seed=3).values
    x = sample_X(0.5, 0.5, 512, seed=3).values
    m = sample_M(0.5, 512, seed=3).values
    assert not np.array_equal(z, x)
    assert np.all(z > 0) and np.all(x > 0) and np.all(m > 0)
    assert np.all(np.isfinite(z)) and np.all(np.isfinite(x))


def test_z_laplace_transform():
    n = 200_000
    z = sample_Z(0.7, n, seed=1).values
    for lam in (0.5, 1.0, 2.0):
        vals = np.exp(-lam * z)
        se = vals.std(ddof=1) / math.sqrt(n)
        assert abs(vals.mean() - math.exp(-(lam**0.7))) <= 4 * se


def test_z_half_matches_levy_law():
    # one-sample KS against the closed-form CDF erfc(1/(2 sqrt(x)))
    n = 100_000
    z = np.sort(sample_Z(0.5, n, seed=2).values)
    F = erfc(0.5 / np.sqrt(z))
    i = np.arange(1, n + 1)
    D = max(np.max(i / n - F), np.max(F - (i - 1) / n))
    assert D <= ks_threshold(n)


def test_m_laplace_transform():
    # M = Z * L^(1/alpha) has Laplace transform 1/(1 + lambda^alpha)
    n = 200_000
    m = sample_M(0.6, n, seed=4).values
    for lam in (0.5, 1.0, 2.0):
        vals = np.exp(-lam * m)
        se = vals.std(ddof=1) / math.sqrt(n)
        assert abs(vals.mean() - 1.0 / (1.0 + lam**0.6)) <= 4 * se


def test_x_laplace_transform():
    # X with density (1+1/r) f + (x/r) f' has transform
    # (1 + alpha lambda^alpha / r) e^(-lambda^alpha)
    alpha, r, n = 0.4, 0.4, 200_000
    x = sample_X(alpha, r, n, seed=6).values
    for lam in (0.5, 1.0, 2.0):
        vals = np.exp(-lam * x)
        se = vals.std(ddof=1) / math.sqrt(n)
        target = (1.0 + alpha * lam**alpha / r) * math.exp(-(lam**alpha))
        assert abs(vals.mean() - target) <= 4 * se


def test_quantile_roundtrip():
    p = np.linspace(0.005, 0.995, 199)
    for alpha in (0.3, 0.6, 0.85):
        x = quantile_Z(alpha, p)
        assert np.all(np.diff(x) > 0)
        assert np.abs(stable_cdf_batch(alpha, x) - p).max() <= 1e-7


def test_ks_threshold_formula():
    k = math.sqrt(-0.5 * math.log(0.5e-3))
    assert ks_threshold(100_000) == pytest.approx(k / math.sqrt(100_000), rel=1e-12)
    assert ks_threshold(100_000, 100_000) == pytest.approx(
        k * math.sqrt(2.0 / 100_000), rel=1e-12
    )
    assert ks_threshold(10_000, level=0.05) < ks_threshold(10_000)


def test_verify_identity_additive():
    rep = verify_identity("additive", 0.4, r=0.5, n=50_000, seed=0)
    assert rep.statistic == "KS"
    assert rep.passed
    assert rep.discrepancy <= rep.threshold
    assert rep.detail["composition"] == "(alpha/r)^(1/alpha) M + X"


def test_verify_identity_multiplicative():
    rep = verify_identity("multiplicative", 0.3, r=0.3, n=50_000, seed=0)
    assert rep.statistic == "mellin_grid"
    assert rep.passed
    # the plain grid at r = alpha: s in {-1, -0.5, 0.1, 0.5, 0.9}
    assert "s=0.9" in rep.detail and "s=-1.0" in rep.detail


def test_verify_identity_multiplicative_large_r():
    # away from r = alpha the positive s-grid contracts so the top moment
    # order r*s stays below alpha/2, keeping the estimator variance finite
    rep = verify_identity("multiplicative", 0.7, r=3.0, n=100_000, seed=0)
    assert rep.passed
    keys = [k for k in rep.detail if not k.startswith("s=-")]
    assert keys and all(3.0 * float(k[2:]) < 0.5 * 0.7 + 1e-12 for k in keys)


def test_verify_identity_laplace():
    rep = verify_identity("laplace", 0.5, n=100_000, seed=0)
    assert rep.statistic == "laplace_grid"
    assert rep.passed
    assert rep.threshold == 4.0


def test_verify_identity_guards():
    with pytest.raises(ValueError, match="unknown identity"):
        verify_identity("mellin", 0.4, r=0.5, n=10)
    with pytest.raises(ValueError, match="r is required"):
        verify_identity("additive", 0.4, n=10)
    with pytest.raises(ValueError, match="positive"):
        verify_identity("additive", 0.4, r=0.0, n=10)
    with pytest.raises(ValueError):
        verify_identity("laplace", 0.4, n=0)


def test_sampler_frontier_guards():
    # below the flat frontier r = alpha
    with pytest.raises(ValueError, match="density only for r >="):
        sample_X(0.4, 0.2, 10)
    # between alpha and the computed frontier R(0.8) ~ 1.44
    with pytest.raises(ValueError, match="frontier"):
        sample_X(0.8, 1.0, 10)
    with pytest.raises(ValueError):
        sample_Z(0.5, 0)


def test_density_sampler_gof():
    stat, pval = density_sampler_gof(0.6, n=100_000, seed=0)
    assert stat >= 0.0
    assert pval > 1e-3


def test_calibration_singles_out_winner():
    rep = calibrate_exponent(n=200_000)
    assert rep.chosen == "-1/alpha"
    assert rep.passed == {"-1/alpha": True, "-(1-alpha)/alpha": False}
    assert max(rep.exponent_at["-1/alpha"].values()) <= 4.0
    assert max(rep.exponent_at["-(1-alpha)/alpha"].values()) > 20.0
