"""Backend switch for the compiled kernels.

Setting ``TRICOMI_DISABLE_NUMBA=1`` in the environment (before import) forces
the vectorised numpy implementations even when numba is installed.
"""
import os

_flag = os.environ.get("TRICOMI_DISABLE_NUMBA", "").strip().lower()
DISABLED = _flag in {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(fn):
    """Compile ``fn`` in nopython mode when numba is importable at all.

    The compiled object is built even when the numpy backend is selected so
    the benchmark and equivalence tests can still reach it.
    """
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)
