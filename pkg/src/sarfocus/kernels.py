"""Kernel backend selection.

The compiled Cython extension is used when it imports; otherwise, or when
``SARFOCUS_PURE_PYTHON=1`` is set, the numpy fallback is used.  Both expose
``backproject`` and ``interp_rows`` with identical semantics.
"""

import os

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels

if _ckernels is not None and os.environ.get("SARFOCUS_PURE_PYTHON", "") in ("", "0"):
    BACKEND = "compiled"
else:
    BACKEND = "python"

_threads = 1


def available_backends():
    return tuple(_BACKENDS)


def use_backend(name):
    """Switch the active backend; returns the previous name."""
    global BACKEND
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    previous, BACKEND = BACKEND, name
    return previous


def set_threads(n):
    global _threads
    _threads = max(1, int(n))


def get_threads():
    return _threads


def backproject(profiles, positions, xs, ys, z, dr, kref, interp=0, backend=None):
    impl = _BACKENDS[backend or BACKEND]
    return impl.backproject(
        np.ascontiguousarray(profiles, dtype=np.complex128),
        np.ascontiguousarray(positions, dtype=np.float64),
        np.ascontiguousarray(xs, dtype=np.float64),
        np.ascontiguousarray(ys, dtype=np.float64),
        float(z), float(dr), float(kref), int(interp), _threads,
    )


def interp_rows(xsrc, ysrc, xdst, cubic=True, backend=None):
    impl = _BACKENDS[backend or BACKEND]
    return impl.interp_rows(
        np.ascontiguousarray(xsrc, dtype=np.float64),
        np.ascontiguousarray(ysrc, dtype=np.complex128),
        np.ascontiguousarray(xdst, dtype=np.float64),
        bool(cubic), _threads,
    )
