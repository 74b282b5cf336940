"""Backend selection for the propagation kernel.

The compiled extension is used when it imports; otherwise the NumPy
fallback. ``ROTGATE_BACKEND=python`` forces the fallback.
"""
import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _fallback}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

BACKEND = "cython" if _compiled is not None and os.environ.get("ROTGATE_BACKEND") != "python" else "python"


def available():
    return tuple(_BACKENDS)


def use_backend(name: str) -> None:
    global BACKEND
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available()}")
    BACKEND = name


def propagate_steps(*args, backend=None):
    return _BACKENDS[backend or BACKEND].propagate_steps(*args)
