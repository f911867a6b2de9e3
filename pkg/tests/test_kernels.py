"""The numba and numpy kernel variants must agree to near machine precision.

Each entry in ``kernels.PAIRS`` is driven with the same precomputed inputs the
library uses (series coefficients and quadrature panels from the density
cache, the Mittag-Leffler gamma table), and every returned array is compared
elementwise.  A subprocess check covers the env-flag fallback end to end.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from stablepow import backend_name, kernels, stable_density, stable_density_prime
from stablepow.density import _cache
from stablepow.specfun import _invg_table


def _agree(a, b, rel=5e-13):
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    assert a.shape == b.shape
    scale = np.maximum(np.abs(a), np.abs(b))
    bad = np.abs(a - b) > rel * np.maximum(scale, 1e-300)
    assert not bad.any(), f"max rel diff {np.max(np.abs(a - b) / np.maximum(scale, 1e-300))}"


def _compare(name, *args, rel=5e-13):
    nb, np_ = kernels.PAIRS[name]
    out_nb, out_np = nb(*args), np_(*args)
    if not isinstance(out_nb, tuple):
        out_nb, out_np = (out_nb,), (out_np,)
    assert len(out_nb) == len(out_np)
    for a, b in zip(out_nb, out_np):
        _agree(a, b, rel=rel)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_density_kernels_agree(alpha):
    rng = np.random.default_rng(7)
    c = _cache(alpha)
    x_hi = np.exp(rng.uniform(np.log(c.xstar), np.log(50.0), 200))
    x_lo = np.exp(rng.uniform(np.log(c.xstar) - 4.0, np.log(c.xstar), 200))
    _compare("hp_batch", x_hi, alpha, c.lg, c.sg)
    _compare("kanter_quad_batch", x_lo, c.psi, c.lnw_hi, c.gw_hi)
    _compare("kanter_quad_batch", x_lo, c.psi, c.lnw_lo, c.gw_lo)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_ml_series_kernels_agree(alpha):
    rng = np.random.default_rng(8)
    y = rng.uniform(0.0, 1.5, 300)  # series branch only; both paths guard alike
    nb, np_ = kernels.PAIRS["ml_series_batch"]
    E1, Ep1, err1, errp1, ok1 = nb(y, _invg_table(alpha))
    E2, Ep2, err2, errp2, ok2 = np_(y, _invg_table(alpha))
    assert np.array_equal(ok1, ok2)
    # the alternating sums cancel, so the variants agree within the error
    # bounds each one commits to, not to bare machine epsilon
    assert np.all(np.abs(E1 - E2) <= err1 + err2 + 5e-13 * np.abs(E1))
    assert np.all(np.abs(Ep1 - Ep2) <= errp1 + errp2 + 5e-13 * np.abs(Ep1))
    _agree(err1, err2, rel=1e-12)
    _agree(errp1, errp2, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.15, 0.5, 0.85])
def test_angular_kernels_agree(alpha):
    rng = np.random.default_rng(9)
    u = rng.uniform(1e-9, np.pi - 1e-9, 400)
    _compare("b_triple_batch", u, alpha)
    _compare("a_c_batch", u, min(alpha, 1.0 - alpha) / max(alpha, 1.0 - alpha))
    _compare("eulerian_diff_batch", u, alpha, 40)


def test_sampler_kernel_agrees():
    rng = np.random.default_rng(10)
    u1 = rng.uniform(1e-12, 1.0 - 1e-12, 500)
    u2 = rng.uniform(1e-12, 1.0 - 1e-12, 500)
    for alpha in (0.2, 0.5, 0.8):
        _compare("z_transform_batch", u1, u2, alpha)


def test_numpy_fallback_subprocess():
    code = (
        "import json, stablepow\n"
        "f = stablepow.stable_density(0.7, 1.3)\n"
        "fp = stablepow.stable_density_prime(0.7, 1.3)\n"
        "print(json.dumps({'backend': stablepow.backend_name(),"
        " 'f': f.value, 'fp': fp.value}))\n"
    )
    env = dict(os.environ, STABLEPOW_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True
    )
    got = json.loads(out.stdout)
    assert got["backend"] == "numpy"
    assert got["f"] == pytest.approx(stable_density(0.7, 1.3).value, rel=1e-13)
    assert got["fp"] == pytest.approx(stable_density_prime(0.7, 1.3).value, rel=1e-13)


def test_default_backend_name():
    assert backend_name() in ("numba", "numpy")
