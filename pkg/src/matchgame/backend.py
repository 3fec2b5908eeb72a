"""Kernel backend selection.

The hot kernels in :mod:`matchgame.kernels` are plain functions over numpy
arrays.  By default they are compiled with numba's ``@njit``; setting the
environment variable ``MATCHGAME_BACKEND=numpy`` before import keeps them as
interpreted numpy code (slower, dependency-light, useful for debugging).
``MATCHGAME_BACKEND=numba`` insists on numba and fails loudly if it is
missing.
"""

from __future__ import annotations

import os

_ENV_VAR = "MATCHGAME_BACKEND"
_VALID = ("numba", "numpy")


def _select() -> str:
    requested = os.environ.get(_ENV_VAR, "").strip().lower()
    if requested and requested not in _VALID:
        raise ValueError(
            f"{_ENV_VAR}={requested!r}: expected one of {', '.join(_VALID)}"
        )
    if requested == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if requested == "numba":
            raise
        return "numpy"
    return "numba"


_ACTIVE = _select()


def active_backend() -> str:
    """Return the backend in use: ``"numba"`` or ``"numpy"``."""
    return _ACTIVE


def jit(fn):
    """Compile ``fn`` under the numba backend; return it unchanged otherwise."""
    if _ACTIVE == "numba":
        from numba import njit

        return njit(cache=True, nogil=True)(fn)
    return fn
