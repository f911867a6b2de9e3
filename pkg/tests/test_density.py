"""Stable density, CDF, power densities and the small-x limit values.

Reference values: mpmath (dps=140 for the density family, 60 for the CDF)
summing the alternating series

    f(x)  = (1/pi) sum_n (-1)^(n-1) Gamma(1+an)/n! sin(pi a n) x^(-an-1)
    f'(x) = termwise derivative
    1-F(x)= termwise antiderivative, x^(-an)/(an)

with run-of-three stopping (single terms vanish exactly at sine zeros).
The series converges for every x > 0 when a < 1, so it covers both the
series and the quadrature branch of the implementation.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erfc

from stablepow import (
    boundary_class,
    boundary_limits,
    g_function,
    h_function,
    laplace_transform,
    mellin,
    power_density,
    series_cut,
    stable_cdf,
    stable_density,
    stable_density_prime,
)
from stablepow.density import stable_cdf_batch, stable_density_batch

# (alpha, x) -> (f, f'); mpmath dps=140
DENSITY_ORACLE = {
    (0.4, 0.05): (1.1681015373549887, 6.0694952061325469),
    (0.4, 0.5): (0.34650514905217869, -0.69809281404041517),
    (0.4, 1.0): (0.16409343761753073, -0.18700992698663825),
    (0.4, 3.0): (0.043580162768645697, -0.018309253162348617),
    (0.8, 0.3): (0.00076917218372697431, 0.09606425510323761),
    (0.8, 1.0): (0.54562695948554474, -1.2844396295383116),
    (0.8, 2.0): (0.10258186691169799, -0.12041121535682783),
}

# (alpha, x) -> F; mpmath dps=60
CDF_ORACLE = {
    (0.3, 0.5): 0.34983299426393829,
    (0.3, 1.0): 0.43244874100630498,
    (0.3, 4.0): 0.58373890066722193,
    (0.7, 0.7): 0.38191393730596113,
    (0.7, 1.5): 0.67146184599690652,
    (0.7, 6.0): 0.89340834036071792,
}


@pytest.mark.parametrize("key", sorted(DENSITY_ORACLE))
def test_density_oracle(key):
    alpha, x = key
    f_ref, fp_ref = DENSITY_ORACLE[key]
    res = stable_density(alpha, x)
    assert res.value == pytest.approx(f_ref, rel=1e-12)
    assert abs(res.value - f_ref) <= max(res.abs_error_estimate, 1e-15)
    resp = stable_density_prime(alpha, x)
    assert resp.value == pytest.approx(fp_ref, rel=1e-11)


@pytest.mark.parametrize("key", sorted(CDF_ORACLE))
def test_cdf_oracle(key):
    alpha, x = key
    assert stable_cdf(alpha, x) == pytest.approx(CDF_ORACLE[key], abs=1e-13)


def test_levy_closed_forms():
    # alpha = 1/2: f(x) = x^(-3/2) e^(-1/4x) / (2 sqrt(pi)), F(x) = erfc(1/(2 sqrt(x)))
    for x in (0.02, 0.3, 1.0, 8.0, 50.0):
        ref = x**-1.5 * math.exp(-0.25 / x) / (2.0 * math.sqrt(math.pi))
        assert stable_density(0.5, x).value == pytest.approx(ref, rel=1e-12)
        assert stable_cdf(0.5, x) == pytest.approx(float(erfc(0.5 / math.sqrt(x))), abs=1e-13)


def test_branch_agreement_at_seam():
    # the two evaluation branches must agree where the dispatch flips
    for alpha in (0.6, 0.75, 0.9):
        xstar = series_cut(alpha)
        eps = 1e-9 * xstar
        xs = np.array([xstar - eps, xstar + eps])
        f, fp, _, _, _ = stable_density_batch(alpha, xs)
        jump = abs(f[1] - f[0])
        drift = abs(fp).max() * 2 * eps  # what a smooth function may move
        assert jump <= drift + 1e-8


def test_derivative_consistency():
    rng = np.random.default_rng(3)
    for _ in range(20):
        alpha = float(rng.uniform(0.15, 0.95))
        x = float(rng.uniform(0.3, 5.0))
        h = 1e-6 * x
        fd = (stable_density(alpha, x + h).value - stable_density(alpha, x - h).value) / (2 * h)
        assert stable_density_prime(alpha, x).value == pytest.approx(fd, rel=1e-6)


def test_normalization_and_laplace():
    for alpha in (0.2, 0.5, 0.8):
        assert mellin(alpha, 0.0) == pytest.approx(1.0, abs=1e-9)
        for lam in (0.5, 1.0, 2.0):
            ref = math.exp(-(lam**alpha))
            assert laplace_transform(alpha, lam) == pytest.approx(ref, abs=1e-7)


def test_mellin_closed_form():
    # E[Z^s] = Gamma(1 - s/alpha) / Gamma(1 - s) for s < alpha
    for alpha in (0.3, 0.6, 0.9):
        for s in (-2.0, -0.5, 0.1 * alpha, 0.9 * alpha):
            ref = math.gamma(1.0 - s / alpha) / math.gamma(1.0 - s)
            assert mellin(alpha, s) == pytest.approx(ref, rel=1e-9)
    with pytest.raises(ValueError):
        mellin(0.6, 0.6)
    with pytest.raises(ValueError):
        mellin(0.6, 1.3)


def test_cdf_monotone_and_bounded():
    for alpha in (0.25, 0.55, 0.85):
        x = np.geomspace(1e-3, 1e3, 400)
        F = stable_cdf_batch(alpha, x)
        assert np.all(np.diff(F) >= -1e-15)
        assert F[0] >= 0.0 and F[-1] <= 1.0
        # leading tail term: 1 - F ~ Gamma(1+a) sin(pi a) / (a pi) x^-a
        t1 = math.gamma(1 + alpha) * math.sin(math.pi * alpha) / (alpha * math.pi) * 1e3**-alpha
        assert 1.0 - F[-1] == pytest.approx(t1, rel=0.25)


def test_cdf_matches_integrated_density():
    for alpha, x0 in ((0.4, 0.8), (0.7, 1.6)):
        val, err = quad(lambda t: stable_density(alpha, t).value, 1e-12, x0, limit=200)
        assert stable_cdf(alpha, x0) == pytest.approx(val, abs=1e-10)


def test_power_density_change_of_variables():
    # r = 1 is the density itself; r = -1 maps x -> 1/x with the Jacobian
    for alpha, x in ((0.4, 0.7), (0.8, 2.2)):
        f = stable_density(alpha, x).value
        assert power_density(alpha, 1.0, x) == pytest.approx(f, rel=1e-14)
        assert power_density(alpha, -1.0, 1.0 / x) == pytest.approx(f * x * x, rel=1e-13)


def test_power_density_mass():
    for alpha, r in ((0.3, -0.3), (0.6, 2.0), (0.8, -1.5)):
        val, err = quad(lambda t: power_density(alpha, r, t), 1e-9, np.inf, limit=400)
        assert val == pytest.approx(1.0, abs=1e-6)


def test_h_g_definitions():
    alpha, r, x = 0.65, -0.8, 1.4
    f = stable_density(alpha, x).value
    fp = stable_density_prime(alpha, x).value
    assert h_function(alpha, r, x) == pytest.approx((1.0 - r) * f + x * fp, rel=1e-13)
    s = 0.8
    assert g_function(alpha, s, x) == pytest.approx(h_function(alpha, -s, x) / s, rel=1e-13)


def test_boundary_class_cases():
    assert boundary_class(0.4, 1.0) == "zero"
    assert boundary_class(0.4, -0.4) == "finite_positive"
    assert boundary_class(0.4, -0.5) == "infinite"
    assert boundary_class(0.7, -0.2) == "zero"


def test_boundary_limits_values():
    # r = -alpha: level 1/Gamma(1-a); slope -1/Gamma(1-2a) (checked against
    # central differences of the power density itself, which converge O(x))
    for alpha in (0.3, 0.5, 0.7):
        level, slope = boundary_limits(alpha, -alpha)
        assert level == pytest.approx(1.0 / math.gamma(1.0 - alpha), rel=1e-13)
        if alpha == 0.5:
            assert slope == 0.0  # 1/Gamma(0) vanishes
        else:
            assert slope == pytest.approx(-1.0 / math.gamma(1.0 - 2.0 * alpha), rel=1e-13)
        x = 1e-4
        assert power_density(alpha, -alpha, x) == pytest.approx(level, abs=1e-3)
        fd = (power_density(alpha, -alpha, 2e-4) - power_density(alpha, -alpha, 1e-4)) / 1e-4
        if alpha == 0.5:
            assert abs(fd) < 1e-4  # higher-order residue only
        else:
            assert fd == pytest.approx(slope, rel=2e-3)
    lvl, slope = boundary_limits(0.4, 1.0)
    assert lvl == 0.0 and math.isnan(slope)
    lvl, slope = boundary_limits(0.4, -0.6)
    assert math.isinf(lvl) and math.isnan(slope)


def test_underflow_flagged():
    # deep left tail: the true value falls below the double range and the
    # evaluation reports an exact flushed zero instead of garbage
    res = stable_density(0.9, 0.3)
    assert res.value == 0.0
    assert res.underflow


def test_argument_guards():
    with pytest.raises(ValueError):
        stable_density(0.4, 0.0)
    with pytest.raises(ValueError):
        stable_density(0.4, -1.0)
    with pytest.raises(ValueError):
        power_density(0.4, 0.0, 1.0)
    with pytest.raises(ValueError):
        g_function(0.4, -1.0, 1.0)
