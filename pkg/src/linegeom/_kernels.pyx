# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the stencil derivative and curvature kernels.

Mirrors :mod:`linegeom._kernels_py` function for function; the stencil
templates and step factors are taken from :mod:`linegeom._fd` so both
backends use identical offsets and weights.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, isfinite, hypot

from . import _fd
from ._kernels_py import LR_KIND, LCR_KIND, DIMS, OK, SINGULAR_INPUT, DEGENERATE, FD_FAILURE
from .errors import DegenerateStepError, OutOfDomainError

cnp.import_array()

cdef enum:
    MAXD = 3

cdef int E_OK = 0
cdef int E_STEP = 1
cdef int E_DOMAIN = 2


cdef inline double _value(int kind, const double* p, double omega) noexcept nogil:
    cdef double X
    if kind == 0:
        return p[0] / (p[0] * p[0] + omega * omega * p[1] * p[1])
    X = omega * p[0] - 1.0 / (omega * p[1])
    return (p[2] + X) / (p[2] * p[2] + X * X)


cdef inline bint _in_domain(int kind, const double* p, double omega) noexcept nogil:
    cdef double X
    if kind == 0:
        return p[0] != 0.0 or p[1] != 0.0
    if not p[1] > 0.0:
        return False
    X = omega * p[0] - 1.0 / (omega * p[1])
    return p[2] != 0.0 or X != 0.0


cdef inline void _scales(int kind, const double* x, double omega, double* s) noexcept nogil:
    cdef double z, X, c
    if kind == 0:
        z = hypot(x[0], omega * x[1])
        s[0] = z
        s[1] = z / omega
    else:
        X = omega * x[0] - 1.0 / (omega * x[1])
        z = hypot(x[2], X)
        s[0] = z / omega
        c = z * omega * x[1] * x[1]
        s[1] = fabs(x[1]) if fabs(x[1]) < c else c
        s[2] = z


cdef class _Template:
    cdef public int dim, order, nidx, noff
    cdef public object offsets, weights, powers
    cdef double[:, ::1] off_v
    cdef double[:, ::1] w_v
    cdef double[:, ::1] pw_v

    def __init__(self, int dim, int order):
        _, offsets, weights, powers = _fd.template(dim, order)
        self.dim = dim
        self.order = order
        self.offsets = np.ascontiguousarray(offsets)
        self.weights = np.ascontiguousarray(weights)
        self.powers = np.ascontiguousarray(powers)
        self.off_v = self.offsets
        self.w_v = self.weights
        self.pw_v = self.powers
        self.nidx = weights.shape[0]
        self.noff = offsets.shape[0]


_templates = {}


cdef _Template _template(int dim, int order):
    key = (dim, order)
    t = _templates.get(key)
    if t is None:
        t = _Template(dim, order)
        _templates[key] = t
    return <_Template>t


cdef int _partials(int kind, const double* x, double omega, const double* scale,
                   _Template t, double step_factor, double* out) noexcept:
    """All partials of one order with Richardson; writes t.nidx values."""
    cdef int dim = t.dim
    cdef int i, k, m, lev
    cdef double h[MAXD]
    cdef double p[MAXD]
    cdef double d_lev[2][64]
    cdef double tfac, v, denom
    cdef double[:, ::1] off = t.off_v
    cdef double[:, ::1] w = t.w_v
    cdef double[:, ::1] pw = t.pw_v
    for i in range(dim):
        h[i] = step_factor * scale[i]
        if not isfinite(h[i]) or 0.5 * h[i] <= 0.0 or 0.5 * h[i] < (2.0 ** -20) * fabs(x[i]):
            return E_STEP
    for lev in range(2):
        tfac = 1.0 if lev == 0 else 0.5
        for m in range(t.nidx):
            d_lev[lev][m] = 0.0
        for k in range(t.noff):
            for i in range(dim):
                p[i] = x[i] + off[k, i] * (h[i] * tfac)
            if not _in_domain(kind, p, omega):
                return E_DOMAIN
            v = _value(kind, p, omega)
            if not isfinite(v):
                return E_DOMAIN
            for m in range(t.nidx):
                if w[m, k] != 0.0:
                    d_lev[lev][m] += w[m, k] * v
        for m in range(t.nidx):
            denom = 1.0
            for i in range(dim):
                denom *= (h[i] * tfac) ** pw[m, i]
            d_lev[lev][m] /= denom
    for m in range(t.nidx):
        out[m] = (4.0 * d_lev[1][m] - d_lev[0][m]) / 3.0
    return E_OK


def hessian_derivatives(int kind, x, double omega, int max_order=4):
    cdef int dim = DIMS[kind]
    cdef double xv[MAXD]
    cdef double s[MAXD]
    cdef double buf[64]
    cdef int i, n, status
    cdef _Template t
    xa = np.asarray(x, dtype=float)
    for i in range(dim):
        xv[i] = xa[i]
    _scales(kind, xv, omega, s)
    tensors, errors = {}, {}
    for n in range(2, max_order + 1):
        t = _template(dim, n)
        status = _partials(kind, xv, omega, s, t, _fd.STEP_FACTORS[n], buf)
        if status == E_STEP:
            raise DegenerateStepError(f"finite-difference step underflows at {xa.tolist()}")
        if status == E_DOMAIN:
            raise OutOfDomainError(f"stencil around {xa.tolist()} leaves the field domain")
        tensors[n] = _fd.symmetric_tensor(dim, n, [buf[i] for i in range(t.nidx)])
        errors[n] = float("nan")
    return tensors, errors


cdef inline int _idx2(int dim, int i, int j) noexcept nogil:
    # position of sorted (i, j) in combinations_with_replacement order
    cdef int a = i if i < j else j
    cdef int b = j if i < j else i
    return a * dim - (a * (a - 1)) // 2 + (b - a)


cdef int _idx3(int dim, int i, int j, int k) noexcept nogil:
    cdef int a = i, b = j, c = k, tmp, pos = 0, x, y
    if a > b:
        tmp = a; a = b; b = tmp
    if b > c:
        tmp = b; b = c; c = tmp
    if a > b:
        tmp = a; a = b; b = tmp
    # count multi-indices preceding (a, b, c) lexicographically
    for x in range(a):
        pos += ((dim - x) * (dim - x + 1)) // 2
    for y in range(a, b):
        pos += dim - y
    pos += c - b
    return pos


cdef double _det3(double g[MAXD][MAXD], int dim) noexcept nogil:
    if dim == 2:
        return g[0][0] * g[1][1] - g[0][1] * g[1][0]
    return (g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
            - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]))


cdef void _inv(double g[MAXD][MAXD], int dim, double det, double gi[MAXD][MAXD]) noexcept nogil:
    if dim == 2:
        gi[0][0] = g[1][1] / det
        gi[1][1] = g[0][0] / det
        gi[0][1] = -g[0][1] / det
        gi[1][0] = -g[1][0] / det
        return
    gi[0][0] = (g[1][1] * g[2][2] - g[1][2] * g[2][1]) / det
    gi[0][1] = (g[0][2] * g[2][1] - g[0][1] * g[2][2]) / det
    gi[0][2] = (g[0][1] * g[1][2] - g[0][2] * g[1][1]) / det
    gi[1][0] = (g[1][2] * g[2][0] - g[1][0] * g[2][2]) / det
    gi[1][1] = (g[0][0] * g[2][2] - g[0][2] * g[2][0]) / det
    gi[1][2] = (g[0][2] * g[1][0] - g[0][0] * g[1][2]) / det
    gi[2][0] = (g[1][0] * g[2][1] - g[1][1] * g[2][0]) / det
    gi[2][1] = (g[0][1] * g[2][0] - g[0][0] * g[2][1]) / det
    gi[2][2] = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) / det


cdef void _hessian_ricci(int dim, double g[MAXD][MAXD], double gi[MAXD][MAXD],
                         const double* d3, double* R, double* scale) noexcept nogil:
    """Scalar curvature of a Hessian metric from its third partials.

    Same contraction as the general pipeline; the fourth-partial terms are
    omitted because they cancel exactly for a Hessian metric.
    """
    cdef double G1[MAXD][MAXD][MAXD]
    cdef double Gam[MAXD][MAXD][MAXD]
    cdef double dgi[MAXD][MAXD][MAXD]
    cdef double dGam[MAXD][MAXD][MAXD][MAXD]
    cdef double ric, t1, t2, t3, t4, acc, sc
    cdef int a, b, c, d, e, i, j, k, l, m, n
    for k in range(dim):
        for i in range(dim):
            for j in range(dim):
                G1[k][i][j] = 0.5 * d3[_idx3(dim, i, j, k)]
    for a in range(dim):
        for i in range(dim):
            for j in range(dim):
                acc = 0.0
                for k in range(dim):
                    acc += gi[a][k] * G1[k][i][j]
                Gam[a][i][j] = acc
    for a in range(dim):
        for k in range(dim):
            for l in range(dim):
                acc = 0.0
                for m in range(dim):
                    for n in range(dim):
                        acc += gi[a][m] * d3[_idx3(dim, m, n, l)] * gi[n][k]
                dgi[a][k][l] = -acc
    for a in range(dim):
        for i in range(dim):
            for j in range(dim):
                for l in range(dim):
                    acc = 0.0
                    for k in range(dim):
                        acc += dgi[a][k][l] * G1[k][i][j]
                    dGam[a][i][j][l] = acc
    R[0] = 0.0
    sc = 0.0
    for b in range(dim):
        for d in range(dim):
            t1 = 0.0
            t2 = 0.0
            t3 = 0.0
            t4 = 0.0
            for a in range(dim):
                t1 += dGam[a][b][d][a]
                t2 += dGam[a][b][a][d]
                for e in range(dim):
                    t3 += Gam[a][a][e] * Gam[e][b][d]
                    t4 += Gam[a][d][e] * Gam[e][b][a]
            ric = t1 - t2 + t3 - t4
            R[0] += gi[b][d] * ric
            sc += fabs(gi[b][d]) * (fabs(t1 - t2) + fabs(t3) + fabs(t4))
    scale[0] = sc


def grid(int kind, points, double omega, double degeneracy_rel=1e-10):
    cdef int dim = DIMS[kind]
    cdef cnp.ndarray[double, ndim=2, mode="c"] pts = np.ascontiguousarray(
        np.atleast_2d(np.asarray(points, dtype=float)))
    cdef Py_ssize_t npts = pts.shape[0], q
    p2_a = np.full(npts, np.nan)
    det_a = np.full(npts, np.nan)
    ric_a = np.full(npts, np.nan)
    sc_a = np.full(npts, np.nan)
    st_a = np.zeros(npts, dtype=np.int8)
    cdef double[::1] p2v = p2_a
    cdef double[::1] detv = det_a
    cdef double[::1] ricv = ric_a
    cdef double[::1] scv = sc_a
    cdef signed char[::1] stv = st_a
    cdef _Template t2 = _template(dim, 2)
    cdef _Template t3 = _template(dim, 3)
    cdef double f2 = _fd.STEP_FACTORS[2]
    cdef double f3 = _fd.STEP_FACTORS[3]
    cdef double x[MAXD]
    cdef double s[MAXD]
    cdef double d2[64]
    cdef double d3[64]
    cdef double g[MAXD][MAXD]
    cdef double gi[MAXD][MAXD]
    cdef double det, fro, R, sc
    cdef int i, j
    for q in range(npts):
        for i in range(dim):
            x[i] = pts[q, i]
        if not _in_domain(kind, x, omega):
            stv[q] = SINGULAR_INPUT
            continue
        _scales(kind, x, omega, s)
        if _partials(kind, x, omega, s, t2, f2, d2) != E_OK:
            stv[q] = FD_FAILURE
            continue
        if _partials(kind, x, omega, s, t3, f3, d3) != E_OK:
            stv[q] = FD_FAILURE
            continue
        fro = 0.0
        for i in range(dim):
            for j in range(dim):
                g[i][j] = d2[_idx2(dim, i, j)]
                fro += g[i][j] * g[i][j]
        p2v[q] = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        det = _det3(g, dim)
        detv[q] = det
        if fabs(det) <= degeneracy_rel * sqrt(fro) ** dim:
            stv[q] = DEGENERATE
            continue
        _inv(g, dim, det, gi)
        _hessian_ricci(dim, g, gi, d3, &R, &sc)
        ricv[q] = R
        scv[q] = sc
    return p2_a, det_a, ric_a, sc_a, st_a
