"""Backend selection for the hot kernels.

Numba is used when it imports and ``SPINBERRY_NO_NUMBA`` is unset (or ``0``).
Setting ``SPINBERRY_NO_NUMBA=1`` forces the pure-numpy implementations, which
is also what happens automatically when numba is missing.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("SPINBERRY_NO_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by SPINBERRY_NO_NUMBA")
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    _njit = None
    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"


def njit(func):
    """Compile ``func`` with numba when available; otherwise return it unchanged."""
    if _njit is None:
        return func
    return _njit(cache=True, nogil=True)(func)
