"""Backend selection for the hot kernels.

The compiled extension ``linegeom._kernels`` is used when it imports; the
numpy implementation in ``linegeom._kernels_py`` is the fallback.  Setting
``LINEGEOM_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

LR_KIND = _kernels_py.LR_KIND
LCR_KIND = _kernels_py.LCR_KIND
DIMS = _kernels_py.DIMS
OK = _kernels_py.OK
SINGULAR_INPUT = _kernels_py.SINGULAR_INPUT
DEGENERATE = _kernels_py.DEGENERATE
FD_FAILURE = _kernels_py.FD_FAILURE

_compiled = None
if not os.environ.get("LINEGEOM_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

_impl = _compiled if _compiled is not None else _kernels_py
BACKEND = "cython" if _compiled is not None else "python"


def available_backends():
    return ["python"] + (["cython"] if _compiled is not None else [])


def backend_module(name):
    if name == "python":
        return _kernels_py
    if name == "cython" and _compiled is not None:
        return _compiled
    raise ValueError(f"backend {name!r} is not available")


# Cheap, not worth compiling.
field_values = _kernels_py.field_values
field_scales = _kernels_py.field_scales
field_domain = _kernels_py.field_domain
curvature_terms = _kernels_py.curvature_terms


def hessian_derivatives(kind, x, omega, max_order=4):
    return _impl.hessian_derivatives(kind, x, omega, max_order)


def grid(kind, points, omega, degeneracy_rel=1e-10):
    return _impl.grid(kind, points, omega, degeneracy_rel)
