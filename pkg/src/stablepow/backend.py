"""Kernel backend selection.

Hot loops ship in two equivalent implementations: numba ``@njit`` kernels and
plain vectorized numpy.  The numba path is used when numba imports cleanly and
the environment variable ``STABLEPOW_NO_NUMBA`` is unset/empty/"0"; otherwise
the numpy path is used.  Both paths are kept importable so they can be tested
against each other regardless of which one is active.
"""

from __future__ import annotations

import os

__all__ = ["HAS_NUMBA", "USE_NUMBA", "njit", "backend_name"]


def _env_disabled() -> bool:
    val = os.environ.get("STABLEPOW_NO_NUMBA", "").strip().lower()
    return val not in ("", "0", "false", "no")


try:  # pragma: no cover - exercised via subprocess in the test suite
    from numba import njit as _numba_njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    _numba_njit = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _env_disabled()


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAS_NUMBA:
        return _numba_njit(*args, **kwargs)
    # fall back to a no-op decorator so kernel modules always import
    if args and callable(args[0]):
        return args[0]

    def deco(fn):
        return fn

    return deco


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
