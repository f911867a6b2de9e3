"""Command-line surface producing plot-ready CSV/JSON artifacts.

Exit codes: 0 success, 1 gate or per-point failure, 2 usage error.  Outputs
are deterministic for a fixed configuration (and seed, where one applies):
no timestamps, LF line endings, floats at 17 significant digits.  Set
STABLEPOW_THREADS to cap the numba thread pool (no-op on the numpy path).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .backend import USE_NUMBA
from .cmlab import cm_check, log_convexity_threshold, primitive_form, q_polynomial
from .density import (
    laplace_transform,
    power_density,
    series_cut,
    stable_cdf,
    stable_density,
    stable_density_batch,
)
from .errors import StablePowError
from .frontier import classify_point, sweep
from .kanter import certify_inequalities
from . import mc

_VERSION_TAG = f"stablepow-{__version__}"


def _fmt(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def _sanitize(msg: str) -> str:
    """Make an exception message safe inside one CSV cell."""
    return str(msg).replace(",", ";").replace("\n", " ").replace("\r", " ")


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _usage(cond: bool, msg: str) -> None:
    if not cond:
        print(f"usage error: {msg}", file=sys.stderr)
        raise SystemExit(2)


def _apply_thread_env() -> None:
    val = os.environ.get("STABLEPOW_THREADS")
    if not val:
        return
    try:
        k = max(1, int(val))
    except ValueError:
        print(f"warning: ignoring non-integer STABLEPOW_THREADS={val!r}", file=sys.stderr)
        return
    if USE_NUMBA:
        from numba import set_num_threads

        set_num_threads(k)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_frontier(args) -> int:
    _usage(0.0 < args.alpha_min <= args.alpha_max < 1.0,
           "alpha range must satisfy 0 < min <= max < 1")
    _usage(args.steps >= 1, "steps must be >= 1")
    _usage(args.tol > 0.0, "tol must be positive")
    rows = sweep(args.alpha_min, args.alpha_max, args.steps, args.tol)
    lines = ["alpha,R,R_tilde,R_hat,lower,upper,tol,status"]
    for p in rows:
        lines.append(",".join([
            _fmt(p.alpha), _fmt(p.R), _fmt(p.R_tilde), _fmt(p.R_hat),
            _fmt(p.lower_bound), _fmt(p.upper_bound), _fmt(p.tol),
            _sanitize(p.status),
        ]))
    _emit("\n".join(lines) + "\n", args.output)
    return 0 if all(p.status == "ok" for p in rows) else 1


def _cmd_modes(args) -> int:
    _usage(0.0 < args.alpha_min <= args.alpha_max < 1.0,
           "alpha range must satisfy 0 < min <= max < 1")
    _usage(args.alpha_steps >= 1 and args.r_steps >= 1, "step counts must be >= 1")
    _usage(args.r_min <= args.r_max, "r range must satisfy min <= max")
    a_grid = np.unique(np.linspace(args.alpha_min, args.alpha_max, args.alpha_steps))
    r_grid = np.unique(np.linspace(args.r_min, args.r_max, args.r_steps))
    _usage(float(np.min(np.abs(r_grid))) > 1e-9,
           "r grid touches 0; the power r = 0 is excluded")
    lines = ["alpha,r,boundary_class,interior_maxima,verdict,status"]
    ok = True
    for a in map(float, a_grid):
        for r in map(float, r_grid):
            try:
                prof = classify_point(a, r)
                lines.append(f"{_fmt(a)},{_fmt(r)},{prof.boundary_class},"
                             f"{prof.interior_maxima},{prof.verdict},ok")
            except Exception as exc:  # noqa: BLE001 - per-cell fault isolation
                ok = False
                lines.append(f"{_fmt(a)},{_fmt(r)},,,,failed: {_sanitize(exc)}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0 if ok else 1


def _cmd_density(args) -> int:
    _usage(0.0 < args.alpha < 1.0, "alpha must lie in (0, 1)")
    _usage(0.0 < args.x_min <= args.x_max, "x range must satisfy 0 < min <= max")
    _usage(args.points >= 1, "points must be >= 1")
    space = np.linspace if args.spacing == "lin" else np.geomspace
    x = np.unique(space(args.x_min, args.x_max, args.points))
    if args.power is not None:
        _usage(args.power != 0.0 and math.isfinite(args.power),
               "power must be nonzero and finite")
        lines = ["x,density"]
        for xi in map(float, x):
            lines.append(f"{_fmt(xi)},{_fmt(power_density(args.alpha, args.power, xi))}")
    else:
        f, fp, err, _, _ = stable_density_batch(args.alpha, x)
        xstar = series_cut(args.alpha)
        lines = ["x,f,f_prime,est_error,branch"]
        for i, xi in enumerate(map(float, x)):
            branch = "series" if xi >= xstar else "integral"
            lines.append(f"{_fmt(xi)},{_fmt(f[i])},{_fmt(fp[i])},{_fmt(err[i])},{branch}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _parse_fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        _usage(False, f"{what} must be a rational like 3/4 or 0.75; got {text!r}")
        raise AssertionError  # unreachable


def _cmd_cm_check(args) -> int:
    alpha = _parse_fraction(args.alpha, "alpha")
    t = _parse_fraction(args.t, "t")
    _usage(0 < alpha <= 1, "alpha must lie in (0, 1]")
    _usage(t >= 0, "t must be nonnegative")
    _usage(args.max_order >= 0, "max-order must be >= 0")
    rep = cm_check(alpha, t, args.max_order)
    payload = {
        "version": _VERSION_TAG,
        "config": {"alpha": str(alpha), "t": str(t), "max_order": args.max_order},
        "passed": rep.passed,
        "first_failing_order": rep.first_failing_order,
        "witness_mu": None if rep.witness_mu is None else str(rep.witness_mu),
        "witness_lambda": rep.witness_lambda,
        "witness_value": None if rep.witness_value is None else str(rep.witness_value),
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    return 0 if rep.passed else 1


def _gate_from_report(rep) -> dict:
    return {
        "statistic": rep.statistic,
        "discrepancy": rep.discrepancy,
        "threshold": rep.threshold,
        "passed": rep.passed,
        "detail": rep.detail,
    }


def _cmd_verify(args) -> int:
    _usage(args.n >= 2, "n must be >= 2")
    gates: dict = {}

    for a in (0.2, 0.5, 0.8):
        rep = mc.verify_identity("laplace", a, n=args.n, seed=args.seed)
        gates[f"laplace_mc_alpha_{a}"] = _gate_from_report(rep)

    rep = mc.verify_identity("additive", 0.4, r=0.5, n=args.n, seed=args.seed)
    gates["additive_alpha_0.4_r_0.5"] = _gate_from_report(rep)

    rep = mc.verify_identity("multiplicative", 0.3, r=0.3, n=args.n, seed=args.seed)
    gates["multiplicative_alpha_0.3_r_0.3"] = _gate_from_report(rep)

    worst = 0.0
    for a in (0.2, 0.5, 0.8):
        for lam in (0.5, 1.0, 2.0):
            worst = max(worst, abs(laplace_transform(a, lam) - math.exp(-(lam**a))))
    gates["laplace_quadrature"] = {"discrepancy": worst, "threshold": 1e-7,
                                   "passed": worst <= 1e-7}

    worst = 0.0
    for a in (0.25, 0.5, 0.75):
        cert = certify_inequalities(a, 4001)
        worst = max(worst, cert.max_b_prime, cert.max_b_second,
                    cert.max_cot_combo, cert.max_product, cert.max_pf_sign)
    gates["kanter_certificates"] = {"discrepancy": worst, "threshold": 1e-10,
                                    "passed": worst <= 1e-10}

    cm = cm_check(Fraction(3, 4), Fraction(4, 3), 5)
    q5 = q_polynomial(Fraction(3, 4), Fraction(4, 3), 5)
    _, prim = primitive_form(q5)
    at = Fraction(0)
    for c in reversed(q5):
        at = at * Fraction(4, 5) + c
    cm_ok = (cm.first_failing_order == 5 and prim == [81, -27, -135, -150, 35, 195]
             and cm.witness_value is not None and cm.witness_value < 0 and at < 0)
    gates["cm_check_3_4"] = {
        "first_failing_order": cm.first_failing_order,
        "witness_mu": None if cm.witness_mu is None else str(cm.witness_mu),
        "q5_primitive_ascending": prim,
        "q5_at_4_5": str(at),
        "passed": cm_ok,
    }

    passed = all(g["passed"] for g in gates.values())
    payload = {
        "version": _VERSION_TAG,
        "config": {"seed": args.seed, "n": args.n},
        "gates": gates,
        "passed": passed,
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.output)
    if not passed:
        failing = sorted(k for k, g in gates.items() if not g["passed"])
        print(f"failing gates: {', '.join(failing)}", file=sys.stderr)
        return 1
    return 0


def _selftest_checks() -> list:
    def half_alpha_closed_form():
        xs = np.linspace(0.05, 20.0, 64)
        worst = max(abs(power_density(0.5, -0.5, float(v)) -
                        math.exp(-v * v / 4.0) / math.sqrt(math.pi)) for v in xs)
        assert worst <= 1e-10, f"sup deviation {worst:.3e}"

    def levy_density():
        for v in (0.05, 0.3, 1.0, 7.0):
            ref = v**-1.5 * math.exp(-0.25 / v) / (2.0 * math.sqrt(math.pi))
            got = stable_density(0.5, v).value
            assert abs(got - ref) <= 1e-12 * ref, f"x={v}: {got} vs {ref}"

    def levy_cdf():
        from scipy.special import erfc
        for v in (0.1, 1.0, 5.0):
            ref = float(erfc(0.5 / math.sqrt(v)))
            assert abs(stable_cdf(0.5, v) - ref) <= 1e-12, f"x={v}"

    def boundary_limit():
        for a in (0.3, 0.7):
            ref = 1.0 / math.gamma(1.0 - a)
            got = power_density(a, -a, 1e-4)
            assert abs(got - ref) <= 1e-3, f"alpha={a}: {got} vs {ref}"

    def kanter_certificates():
        for a in (0.3, 0.5, 0.8):
            c = certify_inequalities(a, 2001)
            worst = max(c.max_b_prime, c.max_b_second, c.max_cot_combo,
                        c.max_product, c.max_pf_sign)
            assert worst <= 1e-10, f"alpha={a}: worst violation {worst:.3e}"

    def cm_witness():
        rep = cm_check(Fraction(3, 4), Fraction(4, 3), 5)
        assert rep.first_failing_order == 5, rep
        assert rep.witness_value is not None and rep.witness_value < 0, rep

    def log_convexity():
        lc = log_convexity_threshold(Fraction(3, 4))
        assert lc.t_threshold == Fraction(4, 3), lc

    def mode_classification():
        assert classify_point(0.9, -1.0).verdict == "not_unimodal"
        assert classify_point(0.4, -0.4).verdict == "monotone"
        assert classify_point(0.3, 1.0).verdict == "unimodal_nonmonotone"

    def sampler_determinism():
        a = mc.sample_Z(0.7, 1000, seed=1).values
        b = mc.sample_Z(0.7, 1000, seed=1).values
        assert np.array_equal(a, b), "same seed, different batch"
        c = np.concatenate([mc.sample_Z(0.7, 400, seed=1).values,
                            mc.sample_Z(0.7, 600, seed=1, start=400).values])
        assert np.array_equal(a, c), "chunked generation differs"

    def laplace_mc():
        rep = mc.verify_identity("laplace", 0.5, n=50_000, seed=7)
        assert rep.passed, rep

    return [half_alpha_closed_form, levy_density, levy_cdf, boundary_limit,
            kanter_certificates, cm_witness, log_convexity, mode_classification,
            sampler_determinism, laplace_mc]


def _cmd_selftest(args) -> int:
    failures = 0
    for check in _selftest_checks():
        name = check.__name__
        try:
            check()
        except Exception as exc:  # noqa: BLE001 - report and continue
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"ok   {name}")
    print(f"{len(_selftest_checks()) - failures} passed, {failures} failed")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="stablepow",
        description="Positive stable laws: densities, power-shape frontier, "
                    "CM certificates, reproducible sampling.",
    )
    p.add_argument("--version", action="version", version=_VERSION_TAG)
    sub = p.add_subparsers(dest="command", required=True)

    fp = sub.add_parser("frontier", help="tabulate R, R_tilde, R_hat on an alpha grid (CSV)")
    fp.add_argument("--alpha-min", type=float, required=True)
    fp.add_argument("--alpha-max", type=float, required=True)
    fp.add_argument("--steps", type=int, required=True)
    fp.add_argument("--tol", type=float, default=1e-4, help="bisection tolerance (default 1e-4)")
    fp.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    fp.set_defaults(func=_cmd_frontier)

    mp = sub.add_parser("modes", help="shape verdict of Z^r on an (alpha, r) grid (CSV)")
    mp.add_argument("--alpha-min", type=float, required=True)
    mp.add_argument("--alpha-max", type=float, required=True)
    mp.add_argument("--alpha-steps", type=int, required=True)
    mp.add_argument("--r-min", type=float, required=True)
    mp.add_argument("--r-max", type=float, required=True)
    mp.add_argument("--r-steps", type=int, required=True)
    mp.add_argument("-o", "--output", default=None)
    mp.set_defaults(func=_cmd_modes)

    dp = sub.add_parser("density", help="tabulate the stable density (or a power density) on an x grid (CSV)")
    dp.add_argument("--alpha", type=float, required=True)
    dp.add_argument("--x-min", type=float, default=0.05)
    dp.add_argument("--x-max", type=float, default=10.0)
    dp.add_argument("--points", type=int, default=201)
    dp.add_argument("--spacing", choices=("geom", "lin"), default="geom")
    dp.add_argument("--power", type=float, default=None,
                    help="tabulate the density of Z^power instead of Z")
    dp.add_argument("-o", "--output", default=None)
    dp.set_defaults(func=_cmd_density)

    cp = sub.add_parser("cm-check", help="exact complete-monotonicity certificate (JSON)")
    cp.add_argument("--alpha", required=True, help="rational in (0, 1], e.g. 3/4")
    cp.add_argument("--t", required=True, help="nonnegative rational tilt, e.g. 4/3")
    cp.add_argument("--max-order", type=int, default=5)
    cp.add_argument("-o", "--output", default=None)
    cp.set_defaults(func=_cmd_cm_check)

    vp = sub.add_parser("verify-identities", help="run the identity/certificate gates (JSON)")
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--n", type=int, default=100_000, help="MC sample size per gate")
    vp.add_argument("-o", "--output", default=None)
    vp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("selftest", help="quick internal consistency battery")
    sp.set_defaults(func=_cmd_selftest)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _apply_thread_env()
    try:
        return args.func(args)
    except StablePowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
