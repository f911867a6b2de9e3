"""The Kanter function b and the cotangent auxiliaries A_c.

b(u) = (sin u / sin(alpha u))^alpha (sin u / sin(beta u))^beta on (0, pi),
beta = 1 - alpha.  It is positive, strictly decreasing and concave; these
shape facts are what the unimodality machinery rests on, so this module also
ships a numerical certificate for them:

* b' <= 0 and b'' <= 0 pointwise (via stable log-derivative forms),
* alpha^2 cot(alpha u) A_alpha + beta^2 cot(beta u) A_beta <= alpha*beta,
* (A_alpha - A_beta)(alpha A_alpha - beta A_beta) <= 0,

with A_c(u) = c cot(c u) - cot u.  The last product's sign is additionally
certified through an exact partial-fraction expansion whose truncation tail
is bounded analytically (see :func:`eulerian_diff`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .specfun import check_alpha

__all__ = [
    "KanterEval",
    "CertificateReport",
    "b_alpha",
    "b_alpha_batch",
    "a_alpha",
    "a_alpha_batch",
    "eulerian_diff",
    "certify_inequalities",
    "EULERIAN_NTERMS",
]

# Along the partial fraction expansion the residual terms decay like n^-4;
# with the integral comparison tail bound, 6000 terms push the tail below
# 1e-12 across (0, pi).
EULERIAN_NTERMS = 6000

_EDGE = 1e-8  # endpoint exclusion zone for grid certificates


def _check_u(u: float) -> float:
    u = float(u)
    if not (0.0 < u < math.pi):
        raise ValueError(f"u must lie in (0, pi), got {u!r}")
    return u


@dataclass(frozen=True)
class KanterEval:
    """b and its first two derivatives at a point."""

    u: float
    b: float
    b_prime: float
    b_second: float


@dataclass(frozen=True)
class CertificateReport:
    """Worst margins of the shape inequalities over a u-grid.

    All ``max_*`` fields are violations (positive parts); values at or below
    numerical noise certify the corresponding inequality on the grid.
    """

    alpha: float
    grid: int
    max_b_prime: float  # max b' (should be <= ~1e-12)
    max_b_second: float  # max b'' (should be <= ~1e-10)
    max_cot_combo: float  # max of a^2 cot(au) A_a + b^2 cot(bu) A_b - a*b
    max_product: float  # max of (A_a - A_b)(a A_a - b A_b)
    max_pf_sign: float  # max wrong-signed partial-fraction value minus tail
    pf_tail_bound: float  # largest truncation tail bound used


def b_alpha(alpha: float, u: float) -> KanterEval:
    """b, b', b'' at a single point of (0, pi)."""
    alpha = check_alpha(alpha)
    u = _check_u(u)
    b, bp, bpp = kernels.b_triple_batch(np.array([u]), alpha)
    return KanterEval(u, float(b[0]), float(bp[0]), float(bpp[0]))


def b_alpha_batch(alpha: float, u: np.ndarray):
    """(b, b', b'') arrays over ``u``; all entries must lie in (0, pi)."""
    alpha = check_alpha(alpha)
    u = np.asarray(u, dtype=np.float64)
    if u.size and (u.min() <= 0.0 or u.max() >= math.pi):
        raise ValueError("all u must lie in (0, pi)")
    return kernels.b_triple_batch(u, alpha)


def a_alpha(c: float, u: float) -> float:
    """A_c(u) = c cot(c u) - cot(u) for c in (0, 1]."""
    c = float(c)
    if not (0.0 < c <= 1.0):
        raise ValueError(f"parameter must lie in (0, 1], got {c!r}")
    u = _check_u(u)
    if c == 1.0:
        return 0.0
    return float(kernels.a_c_batch(np.array([u]), c)[0])


def a_alpha_batch(c: float, u: np.ndarray) -> np.ndarray:
    """A_c over an array of points in (0, pi)."""
    c = float(c)
    if not (0.0 < c <= 1.0):
        raise ValueError(f"parameter must lie in (0, 1], got {c!r}")
    u = np.asarray(u, dtype=np.float64)
    if u.size and (u.min() <= 0.0 or u.max() >= math.pi):
        raise ValueError("all u must lie in (0, pi)")
    if c == 1.0:
        return np.zeros_like(u)
    return kernels.a_c_batch(u, c)


def eulerian_diff(alpha: float, u, nterms: int = EULERIAN_NTERMS):
    """alpha A_alpha(u) - beta A_beta(u) via exact partial fractions.

    Returns (value, tail_bound) arrays.  The expansion is

        2 u a b (a - b) [ 1/6 + sum_n r_n ],   r_n > 0, r_n = O(n^-4),

    so the sign of the whole expression is that of (alpha - beta), and the
    truncation error is bounded by the integral comparison carried in
    ``tail_bound``.
    """
    alpha = check_alpha(alpha)
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if u.size and (u.min() <= 0.0 or u.max() >= math.pi):
        raise ValueError("all u must lie in (0, pi)")
    return kernels.eulerian_diff_batch(u, alpha, int(nterms))


def certify_inequalities(alpha: float, grid: int = 10**4) -> CertificateReport:
    """Evaluate the shape inequalities on a uniform grid of (0, pi).

    The grid excludes an endpoint zone of width 1e-8 where the functions are
    continued by their series limits anyway.  Expected margins are at
    rounding level; the report carries the worst observed values.
    """
    alpha = check_alpha(alpha)
    grid = int(grid)
    if grid < 2:
        raise ValueError("grid must be >= 2")
    beta = 1.0 - alpha
    u = np.linspace(_EDGE, math.pi - _EDGE, grid)

    _, bp, bpp = kernels.b_triple_batch(u, alpha)
    Aa = kernels.a_c_batch(u, alpha)
    Ab = kernels.a_c_batch(u, beta)

    # a^2 cot(a u) A_a + b^2 cot(b u) A_b <= a*b; rewrite the cotangents via
    # c*cot(cu) = A_c + cot(u) to keep the endpoint behaviour tame:
    #   lhs = a(A_a + cot u)A_a + b(A_b + cot u)A_b
    cotu = np.cos(u) / np.sin(u)
    lhs = alpha * (Aa + cotu) * Aa + beta * (Ab + cotu) * Ab
    combo = lhs - alpha * beta

    prod = (Aa - Ab) * (alpha * Aa - beta * Ab)

    pf, tail = kernels.eulerian_diff_batch(u, alpha, EULERIAN_NTERMS)
    # the certified claim: sign(pf) == sign(alpha - beta) up to the tail
    if alpha == 0.5:
        sign_violation = np.abs(pf) - tail
    else:
        sign_violation = -np.sign(alpha - beta) * pf - tail

    return CertificateReport(
        alpha=alpha,
        grid=grid,
        max_b_prime=float(bp.max()),
        max_b_second=float(bpp.max()),
        max_cot_combo=float(combo.max()),
        max_product=float(prod.max()),
        max_pf_sign=float(sign_violation.max()),
        pf_tail_bound=float(tail.max()),
    )
