"""Pure numpy implementation of the hot kernels.

Selected by :mod:`linegeom.kernels` when the compiled extension is missing.
Two built-in fields are known by integer kind:

* ``LR_KIND``  -- ``r / (r^2 + w^2 L^2)`` in coordinates ``(r, L)``
* ``LCR_KIND`` -- ``(r + X) / (r^2 + X^2)``, ``X = wL - 1/(wC)``, in ``(L, C, r)``
"""

import numpy as np

from . import _fd
from .errors import DegenerateStepError, OutOfDomainError

LR_KIND = 0
LCR_KIND = 1

DIMS = {LR_KIND: 2, LCR_KIND: 3}

# Per-point status codes shared with the compiled kernel.
OK = 0
SINGULAR_INPUT = 1
DEGENERATE = 2
FD_FAILURE = 3


def field_values(kind, pts, omega):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if kind == LR_KIND:
        r, L = pts[:, 0], pts[:, 1]
        return r / (r * r + omega * omega * L * L)
    L, C, r = pts[:, 0], pts[:, 1], pts[:, 2]
    X = omega * L - 1.0 / (omega * C)
    return (r + X) / (r * r + X * X)


def field_scales(kind, x, omega):
    """Characteristic length of variation along each coordinate."""
    if kind == LR_KIND:
        r, L = x
        z = np.hypot(r, omega * L)
        return np.array([z, z / omega])
    L, C, r = x
    X = omega * L - 1.0 / (omega * C)
    z = np.hypot(r, X)
    return np.array([z / omega, min(abs(C), z * omega * C * C), z])


def field_domain(kind, pts, omega):
    pts = np.atleast_2d(pts)
    if kind == LR_KIND:
        return (pts[:, 0] != 0.0) | (pts[:, 1] != 0.0)
    L, C, r = pts[:, 0], pts[:, 1], pts[:, 2]
    X = omega * L - 1.0 / (omega * C)
    return (C > 0.0) & ((r != 0.0) | (X != 0.0))


def hessian_derivatives(kind, x, omega, max_order=4):
    """Derivative tensors of a built-in field at one point.

    Returns ``(tensors, errors)``; ``tensors[n]`` is the full symmetric
    order-``n`` tensor for ``n`` in ``2..max_order`` and ``errors[n]`` the
    largest Richardson error estimate of that order.
    """
    x = np.asarray(x, dtype=float)
    dim = x.size
    scale = field_scales(kind, x, omega)
    func = lambda p: field_values(kind, p, omega)  # noqa: E731
    dom = lambda p: field_domain(kind, p, omega)  # noqa: E731
    tensors, errors = {}, {}
    for n in range(2, max_order + 1):
        vals, errs = _fd.all_partials(func, x, scale, n, domain=dom)
        tensors[n] = _fd.symmetric_tensor(dim, n, vals)
        errors[n] = float(errs.max())
    return tensors, errors


def curvature_terms(g, dg, ddg):
    """Riemann/Ricci pipeline from a metric and its first two derivatives.

    ``dg[i, j, k] = d_k g_ij`` and ``ddg[i, j, k, l] = d_k d_l g_ij``.
    Returns ``(ricci_scalar, scale, riemann_lowered)``; ``scale`` sums the
    absolute values of the derivative and quadratic contributions.
    Convention: R^a_bcd = d_c G^a_bd - d_d G^a_bc + G^a_ce G^e_bd - G^a_de G^e_bc,
    Ric_bd = R^a_bad (a round sphere has positive scalar curvature).
    """
    gi = np.linalg.inv(g)
    G1 = 0.5 * (np.einsum("jki->kij", dg) + np.einsum("ikj->kij", dg) - np.einsum("ijk->kij", dg))
    Gam = np.einsum("ak,kij->aij", gi, G1)
    dG1 = 0.5 * (
        np.einsum("jkil->kijl", ddg) + np.einsum("ikjl->kijl", ddg) - np.einsum("ijkl->kijl", ddg)
    )
    dgi = -np.einsum("am,mnl,nk->akl", gi, dg, gi)
    dGam = np.einsum("akl,kij->aijl", dgi, G1) + np.einsum("ak,kijl->aijl", gi, dG1)
    riem = (
        np.einsum("abdc->abcd", dGam)
        - dGam
        + np.einsum("ace,ebd->abcd", Gam, Gam)
        - np.einsum("ade,ebc->abcd", Gam, Gam)
    )
    ric = np.einsum("abad->bd", riem)
    R = float(np.einsum("bd,bd->", gi, ric))
    t1 = np.einsum("abda->bd", dGam)
    t2 = np.einsum("abad->bd", dGam)
    t3 = np.einsum("aae,ebd->bd", Gam, Gam)
    t4 = np.einsum("ade,eba->bd", Gam, Gam)
    scale = float(np.sum(np.abs(gi) * (np.abs(t1 - t2) + np.abs(t3) + np.abs(t4))))
    lowered = np.einsum("am,mbcd->abcd", g, riem)
    return R, scale, lowered


def grid(kind, points, omega, degeneracy_rel=1e-10):
    """Minors, determinant and Ricci scalar for a batch of points.

    Returns arrays ``(p2, det, ricci, scale, status)``; ``p2`` is the
    leading 2x2 minor (the full determinant when dim is 2).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = points.shape[0]
    p2 = np.full(n, np.nan)
    det = np.full(n, np.nan)
    ricci = np.full(n, np.nan)
    scale = np.full(n, np.nan)
    status = np.zeros(n, dtype=np.int8)
    for k in range(n):
        x = points[k]
        if not field_domain(kind, x[None, :], omega)[0]:
            status[k] = SINGULAR_INPUT
            continue
        try:
            tensors, _ = hessian_derivatives(kind, x, omega, 3)
        except (DegenerateStepError, OutOfDomainError):
            status[k] = FD_FAILURE
            continue
        H = tensors[2]
        p2[k] = H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0]
        det[k] = np.linalg.det(H)
        dim = H.shape[0]
        if abs(det[k]) <= degeneracy_rel * np.linalg.norm(H) ** dim:
            status[k] = DEGENERATE
            continue
        # fourth partials cancel exactly in the scalar for a Hessian metric
        ricci[k], scale[k], _ = curvature_terms(H, tensors[3], np.zeros((dim,) * 4))
    return p2, det, ricci, scale, status
