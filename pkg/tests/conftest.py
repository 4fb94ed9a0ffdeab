import itertools
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def hessian_curvature(H, T):
    """Scalar curvature of a Hessian metric from its second and third partials.

    Uses R_ijkl = -1/4 g^pq (T_ikp T_jlq - T_ilp T_jkq), independent of the
    Christoffel pipeline in the library.
    """
    gi = np.linalg.inv(H)
    Rl = -0.25 * (np.einsum("pq,ikp,jlq->ijkl", gi, T, T) - np.einsum("pq,ilp,jkq->ijkl", gi, T, T))
    return float(np.einsum("ik,jl,ijkl->", gi, gi, Rl))


def sympy_partials(expr, symbols, point):
    """Exact (H, T) of a sympy expression at a point, as floats."""
    import sympy as sp

    sub = dict(zip(symbols, [sp.nsimplify(v) for v in point]))
    n = len(symbols)
    H = np.array([[float(sp.diff(expr, a, b).evalf(30, subs=sub)) for b in symbols] for a in symbols])
    T = np.zeros((n, n, n))
    for i, j, k in itertools.product(range(n), repeat=3):
        T[i, j, k] = float(sp.diff(expr, symbols[i], symbols[j], symbols[k]).evalf(30, subs=sub))
    return H, T


@pytest.fixture(params=["python", "cython"])
def backend(request):
    from linegeom import kernels

    if request.param not in kernels.available_backends():
        pytest.skip(f"{request.param} backend not built")
    return kernels.backend_module(request.param)


# One summary line per acceptance criterion, filled by test_acceptance.py.
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
