"""Backend selection for the hot kernels.

Kernels are compiled with numba when it is importable, unless the
environment variable ``APPTEMP_DISABLE_NUMBA`` is set to a truthy value,
in which case the pure-numpy implementations are used.  The choice is
made once at import time; individual kernel calls may still request a
backend explicitly.
"""
import logging
import os

log = logging.getLogger(__name__)

ENV_FLAG = "APPTEMP_DISABLE_NUMBA"


def _flag_set():
    return os.environ.get(ENV_FLAG, "").strip().lower() not in ("", "0", "false", "no")


try:
    import numba
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba = None
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


USE_NUMBA = HAS_NUMBA and not _flag_set()

if HAS_NUMBA and not USE_NUMBA:
    log.info("%s set, numba kernels disabled", ENV_FLAG)


def resolve_backend(backend=None):
    """Return ``"numba"`` or ``"numpy"`` for an optional explicit request."""
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
