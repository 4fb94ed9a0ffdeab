import math
import os
import subprocess
import sys

import numpy as np
import pytest

from linegeom import _kernels_py, kernels

from conftest import hessian_curvature, rel, sympy_partials


def lcr_points():
    L, C = np.meshgrid(np.linspace(0.05, 1.0, 7), np.linspace(0.02, 1.0, 7), indexing="ij")
    return np.column_stack([L.ravel(), C.ravel(), np.full(L.size, 0.05)])


def test_backend_flag():
    assert kernels.BACKEND in kernels.available_backends()


def test_pure_python_env_switch():
    env = dict(os.environ, LINEGEOM_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from linegeom import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.backend_module("fortran")


def test_derivatives_match_sympy(backend):
    sp = pytest.importorskip("sympy")
    L, C, r = sp.symbols("L C r")
    w = sp.pi
    X = w * L - 1 / (w * C)
    H, T = sympy_partials((r + X) / (r ** 2 + X ** 2), [L, C, r], (0.24, 0.025, 0.08))
    tensors, _ = backend.hessian_derivatives(kernels.LCR_KIND, [0.24, 0.025, 0.08], math.pi, 3)
    assert rel(tensors[2], H) < 1e-7
    assert np.max(np.abs(tensors[3] - T)) < 1e-5 * np.max(np.abs(T))


def test_grid_matches_oracle(backend):
    sp = pytest.importorskip("sympy")
    L, C, r = sp.symbols("L C r")
    X = L - 1 / C
    expr = (r + X) / (r ** 2 + X ** 2)
    pt = (0.5, 0.7, 0.3)
    H, T = sympy_partials(expr, [L, C, r], pt)
    p2, det, ricci, scale, status = backend.grid(kernels.LCR_KIND, np.array([pt]), 1.0)
    assert status[0] == kernels.OK
    assert rel(det[0], np.linalg.det(H)) < 1e-8
    assert rel(p2[0], H[0, 0] * H[1, 1] - H[0, 1] ** 2) < 1e-8
    assert rel(ricci[0], hessian_curvature(H, T)) < 1e-6


def test_backends_agree():
    if "cython" not in kernels.available_backends():
        pytest.skip("compiled backend not built")
    cy = kernels.backend_module("cython")
    for kind, pts, w in (
        (kernels.LCR_KIND, lcr_points(), 1.0),
        (kernels.LR_KIND, np.random.default_rng(1).uniform(1e-3, 1.0, (40, 2)), math.pi),
    ):
        a = _kernels_py.grid(kind, pts, w)
        b = cy.grid(kind, pts, w)
        assert np.array_equal(a[4], b[4])
        ok = a[4] == kernels.OK
        assert rel(b[1][ok], a[1][ok]) < 1e-8
        assert rel(b[0][ok], a[0][ok]) < 1e-8
        assert np.max(np.abs(b[2][ok] - a[2][ok]) / a[3][ok]) < 1e-7


def test_grid_status_codes(backend):
    pts = np.array([
        [0.2, 0.1, 0.05],            # ordinary
        [1.0, 1.0, 0.0],             # r = 0 at resonance (omega = 1)
        [0.2, -0.1, 0.05],           # negative capacitance
    ])
    _, det, ricci, _, status = backend.grid(kernels.LCR_KIND, pts, 1.0)
    assert list(status) == [kernels.OK, kernels.SINGULAR_INPUT, kernels.SINGULAR_INPUT]
    assert np.isnan(ricci[1]) and np.isnan(det[2])


def test_lr_grid_is_flat(backend):
    pts = np.random.default_rng(2).uniform(1e-3, 1.0, (50, 2))
    _, det, ricci, scale, status = backend.grid(kernels.LR_KIND, pts, math.pi)
    assert np.all(status == kernels.OK)
    assert np.all(det < 0)
    assert np.max(np.abs(ricci) / scale) < 1e-6


def test_curvature_terms_sphere():
    # 2-sphere of radius 3 in (theta, phi): R = 2 / 9
    a, th = 3.0, 0.7
    g = np.diag([a * a, (a * math.sin(th)) ** 2])
    dg = np.zeros((2, 2, 2))
    dg[1, 1, 0] = a * a * math.sin(2 * th)
    ddg = np.zeros((2, 2, 2, 2))
    ddg[1, 1, 0, 0] = 2 * a * a * math.cos(2 * th)
    R, scale, lowered = kernels.curvature_terms(g, dg, ddg)
    assert R == pytest.approx(2 / 9, rel=1e-12)
    assert lowered[0, 1, 0, 1] == pytest.approx(a * a * math.sin(th) ** 2, rel=1e-12)
