"""Backend selection for the hot loops.

The compiled extension ``edindex._ckernels`` is used when importable; set
``EDINDEX_BACKEND=python`` to force the pure-Python fallback. Callers always
go through this module's attributes so :func:`set_backend` takes effect
everywhere.
"""
import contextlib
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_NAMES = (
    "lcs_length",
    "lcs_many",
    "ed_distance",
    "ed_align",
    "ed_banded",
    "lis_matching",
    "build_edges",
    "sync_scan",
)

BACKEND = None


def available_backends():
    return ["python"] + (["compiled"] if _ckernels is not None else [])


def set_backend(name):
    """Rebind the kernel functions to ``"compiled"`` or ``"python"``."""
    global BACKEND
    if name == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        mod = _ckernels
    elif name == "python":
        mod = _pykernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    g = globals()
    for fn in _NAMES:
        g[fn] = getattr(mod, fn)
    BACKEND = name


@contextlib.contextmanager
def using(name):
    previous = BACKEND
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


_requested = os.environ.get("EDINDEX_BACKEND", "").strip().lower()
if _requested == "python" or _ckernels is None:
    set_backend("python")
else:
    set_backend("compiled")
