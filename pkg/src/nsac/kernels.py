"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise (or when
``NSAC_PURE_PYTHON=1``) the numpy versions are used. Both return identical
results up to floating-point reassociation.
"""

import os

from . import _kernels_py

if os.environ.get("NSAC_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = _impl.BACKEND
polyline_nearest = _impl.polyline_nearest
momentum_rhs = _impl.momentum_rhs
flux_divergence = _impl.flux_divergence


def get_backend(name: str):
    """Return the kernel module for ``"python"`` or ``"cython"``."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
