"""Numba toggling.

Hot kernels are compiled with numba when it is importable and the
environment variable CAPSIM_DISABLE_NUMBA is unset (or falsey); otherwise
the same source runs interpreted as the pure-python fallback.
"""

import os

DISABLE_ENV = "CAPSIM_DISABLE_NUMBA"

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    NUMBA_AVAILABLE = False


def numba_disabled_by_env() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in {"1", "true", "yes", "on"}


def numba_enabled() -> bool:
    """True when the compiled kernel path should be used."""
    return NUMBA_AVAILABLE and not numba_disabled_by_env()
