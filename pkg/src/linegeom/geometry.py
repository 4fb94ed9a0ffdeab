"""Finite-difference Hessian geometry in two and three dimensions.

The metric of a scalar field ``S`` is its raw Hessian ``g_ij = d_i d_j S``.
Indefinite metrics are allowed everywhere.  Curvature follows the standard
convention in which a round sphere has positive scalar curvature.
"""

from dataclasses import dataclass, field as dc_field
from typing import NamedTuple, Optional

import numpy as np

from . import _fd, kernels
from .errors import SingularConfigurationError

BASIS_NAMES = {
    "lr": ("r", "L"),
    "component": ("L", "C", "r"),
    "impedance": ("X_L", "X_C", "r"),
}

DEGENERACY_REL = 1e-10


@dataclass(frozen=True)
class ParameterPoint:
    """Coordinates of a component state plus the angular frequency."""

    coords: tuple
    basis: str = "generic"
    omega: float = 1.0

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if self.basis in BASIS_NAMES:
            if len(coords) != len(BASIS_NAMES[self.basis]):
                raise ValueError(
                    f"basis {self.basis!r} needs {len(BASIS_NAMES[self.basis])} coordinates, "
                    f"got {len(coords)}"
                )
        elif self.basis != "generic":
            raise ValueError(f"unknown basis {self.basis!r}")
        if not 1 <= len(coords) <= 3:
            raise ValueError("only 1 to 3 coordinates are supported")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def names(self):
        if self.basis in BASIS_NAMES:
            return BASIS_NAMES[self.basis]
        return tuple(f"x{i + 1}" for i in range(len(self.coords)))

    @property
    def array(self):
        return np.array(self.coords)

    def __len__(self):
        return len(self.coords)


def as_point(point):
    if isinstance(point, ParameterPoint):
        return point
    return ParameterPoint(tuple(np.ravel(point)))


def _default_scale(x):
    return np.maximum(np.abs(x), 1.0)


class ScalarField:
    """A smooth scalar function on parameter space.

    ``func`` maps an ``(N, dim)`` array of points to ``N`` values when
    ``vectorized`` is true, otherwise it is called as ``func(*coords)``.
    ``scale(x)`` gives the per-coordinate length over which the field varies
    and sets the finite-difference steps.  ``exact(x, multi_index)`` is an
    optional analytic partial used only by tests and oracles.
    """

    kernel_kind = None

    def __init__(
        self,
        func,
        dim,
        *,
        vectorized=False,
        scale=None,
        domain=None,
        exact=None,
        names=None,
    ):
        self.func = func
        self.dim = dim
        self.vectorized = vectorized
        self._scale = scale or _default_scale
        self._domain = domain
        self.exact = exact
        self.names = tuple(names) if names else tuple(f"x{i + 1}" for i in range(dim))

    def many(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.vectorized:
            return np.asarray(self.func(pts), dtype=float)
        return np.array([self.func(*p) for p in pts], dtype=float)

    def __call__(self, point):
        return float(self.many(as_point(point).array[None, :])[0])

    def scale(self, x):
        return np.asarray(self._scale(np.asarray(x, dtype=float)), dtype=float)

    def domain(self, pts):
        if self._domain is None:
            return np.ones(len(np.atleast_2d(pts)), dtype=bool)
        return self._domain(np.atleast_2d(pts))

    @property
    def has_domain(self):
        return self._domain is not None


class KernelField(ScalarField):
    """One of the built-in effective-power fields, evaluated by the kernels."""

    def __init__(self, kind, omega, names):
        self.kernel_kind = kind
        self.omega = float(omega)
        super().__init__(
            lambda p: kernels.field_values(kind, p, self.omega),
            kernels.DIMS[kind],
            vectorized=True,
            scale=lambda x: kernels.field_scales(kind, x, self.omega),
            domain=lambda p: kernels.field_domain(kind, p, self.omega),
            names=names,
        )


class Derivative(NamedTuple):
    value: float
    error: float


def fd_partial(field, point, multi_index, step=None):
    """Central-difference partial of ``field`` with Richardson extrapolation.

    ``multi_index`` lists coordinate indices, e.g. ``(0, 0, 1)`` for
    d^3/dx0^2 dx1.  ``step`` overrides the base step (scalar or per
    coordinate); by default it is the order-dependent fraction of the field
    scale.
    """
    x = as_point(point).array
    multi_index = tuple(multi_index)
    if len(multi_index) > _fd.MAX_ORDER:
        raise ValueError(f"derivative order {len(multi_index)} exceeds {_fd.MAX_ORDER}")
    orders = _fd.orders_of(multi_index, x.size)
    if step is None:
        n = max(len(multi_index), 1)
        h = _fd.STEP_FACTORS[n] * field.scale(x)
    else:
        h = np.broadcast_to(np.asarray(step, dtype=float), x.shape).copy()
    domain = field.domain if field.has_domain else None
    value, err = _fd.partial(field.many, x, h, orders, domain=domain)
    return Derivative(value, err)


def partial_tensors(field, point, max_order=4):
    """Full symmetric tensors of the partials of order 2..max_order."""
    x = as_point(point).array
    if field.kernel_kind is not None:
        tensors, _ = kernels.hessian_derivatives(field.kernel_kind, x, field.omega, max_order)
        return tensors
    domain = field.domain if field.has_domain else None
    out = {}
    scale = field.scale(x)
    for n in range(2, max_order + 1):
        vals, _ = _fd.all_partials(field.many, x, scale, n, domain=domain)
        out[n] = _fd.symmetric_tensor(x.size, n, vals)
    return out


@dataclass(frozen=True)
class MetricTensor:
    """Symmetric metric at a point, symmetrized on construction."""

    entries: np.ndarray
    coordinate_order: tuple = ()

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (1, 2, 3):
            raise ValueError(f"metric must be square with dim <= 3, got shape {a.shape}")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        order = tuple(self.coordinate_order) or tuple(f"x{i + 1}" for i in range(a.shape[0]))
        if len(order) != a.shape[0]:
            raise ValueError("coordinate_order length must match the metric dimension")
        object.__setattr__(self, "coordinate_order", order)

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def det(self):
        return float(np.linalg.det(self.entries))

    @property
    def frobenius(self):
        return float(np.linalg.norm(self.entries))

    @property
    def degeneracy_epsilon(self):
        return DEGENERACY_REL * self.frobenius ** self.dim

    @property
    def is_degenerate(self):
        return abs(self.det) <= self.degeneracy_epsilon

    def __getitem__(self, key):
        return self.entries[key]

    def component(self, a, b):
        """Entry addressed by coordinate names, e.g. ``g.component("r", "L")``."""
        order = self.coordinate_order
        return float(self.entries[order.index(a), order.index(b)])

    def minors(self):
        return principal_minors(self)


def principal_minors(metric):
    """Leading principal minors in the metric's coordinate order."""
    a = metric.entries if isinstance(metric, MetricTensor) else np.asarray(metric, dtype=float)
    out = []
    for k in range(1, a.shape[0] + 1):
        out.append(float(a[0, 0]) if k == 1 else float(np.linalg.det(a[:k, :k])))
    return out


def hessian_metric(field, point):
    """Metric ``g_ij = d_i d_j S`` from finite differences of ``field``."""
    p = as_point(point)
    x = p.array
    if field.kernel_kind is not None:
        tensors, _ = kernels.hessian_derivatives(field.kernel_kind, x, field.omega, 2)
        H = tensors[2]
    else:
        domain = field.domain if field.has_domain else None
        vals, _ = _fd.all_partials(field.many, x, field.scale(x), 2, domain=domain)
        H = _fd.symmetric_tensor(x.size, 2, vals)
    return MetricTensor(H, field.names if len(field.names) == x.size else p.names)


class HessianMetricField:
    """Metric field of a scalar field; its derivatives are higher partials of S."""

    def __init__(self, field):
        self.field = field

    def __call__(self, point):
        return hessian_metric(self.field, point)

    def scale(self, x):
        return self.field.scale(x)

    def derivatives(self, point):
        t = partial_tensors(self.field, point, 4)
        return t[2], t[3], t[4]


class FunctionMetricField:
    """Wraps ``f(x) -> (dim, dim) array`` as a metric field."""

    def __init__(self, func, names=None, scale=None):
        self.func = func
        self.names = names
        self._scale = scale or _default_scale

    def __call__(self, point):
        return MetricTensor(self.func(as_point(point).array), self.names or ())

    def scale(self, x):
        return np.asarray(self._scale(np.asarray(x, dtype=float)), dtype=float)


def _metric_at(metric_field, x):
    m = metric_field(ParameterPoint(tuple(x)))
    return m.entries if isinstance(m, MetricTensor) else np.asarray(m, dtype=float)


def metric_derivatives(metric_field, point, max_order=2):
    """``(g, dg, ddg)`` with ``dg[i,j,k] = d_k g_ij`` and ``ddg[i,j,k,l]``.

    Uses the field's own ``derivatives`` when it has one (Hessian metric
    fields), otherwise differentiates the metric entries numerically.
    """
    x = as_point(point).array
    if hasattr(metric_field, "derivatives"):
        g, dg, ddg = metric_field.derivatives(point)
        return g, dg, (ddg if max_order >= 2 else None)
    scale = metric_field.scale(x) if hasattr(metric_field, "scale") else _default_scale(x)
    g = _metric_at(metric_field, x)
    dim = x.size
    out = [g]
    for n in range(1, max_order + 1):
        indices, offsets, weights, powers = _fd.template(dim, n)
        h = _fd.STEP_FACTORS[n] * scale
        _fd.check_steps(x, h, (1,) * dim)
        levels = []
        for t in (1.0, 0.5):
            stack = np.array([_metric_at(metric_field, x + o * h * t) for o in offsets])
            denom = np.prod((h * t)[None, :] ** powers, axis=1)
            levels.append(np.einsum("mk,kij->mij", weights, stack) / denom[:, None, None])
        vals = (4.0 * levels[1] - levels[0]) / 3.0
        full = np.empty((dim, dim) + (dim,) * n)
        for i in range(dim):
            for j in range(dim):
                full[i, j] = _fd.symmetric_tensor(dim, n, vals[:, i, j])
        out.append(full)
    if max_order == 1:
        out.append(None)
    return tuple(out)


def christoffel_first_kind(metric_field, point):
    """``gamma[k, i, j] = 1/2 (d_i g_jk + d_j g_ik - d_k g_ij)``."""
    _, dg, _ = metric_derivatives(metric_field, point, max_order=1)
    return 0.5 * (
        np.einsum("jki->kij", dg) + np.einsum("ikj->kij", dg) - np.einsum("ijk->kij", dg)
    )


@dataclass(frozen=True)
class CurvatureReport:
    dim: int
    ricci_scalar: float
    det_g: float
    minors: tuple
    regular: bool
    riemann_1212: Optional[float] = None
    scale: float = float("nan")
    metric: Optional[MetricTensor] = dc_field(default=None, compare=False)

    @property
    def scaled_ricci(self):
        """|R| relative to the magnitude of the terms it is summed from."""
        if not self.scale > 0:
            return abs(self.ricci_scalar)
        return abs(self.ricci_scalar) / self.scale


def _require_regular(metric, strict):
    if metric.is_degenerate and strict:
        raise SingularConfigurationError(
            f"degenerate metric: |det g| = {abs(metric.det):.3e} <= {metric.degeneracy_epsilon:.3e}",
            det=metric.det,
        )
    return not metric.is_degenerate


def _hessian_2d_parts(field, point):
    t = partial_tensors(field, point, 3)
    H, T = t[2], t[3]
    s11, s12, s22 = H[0, 0], H[0, 1], H[1, 1]
    s111, s112, s122, s222 = T[0, 0, 0], T[0, 0, 1], T[0, 1, 1], T[1, 1, 1]
    # N = det [[S11, S12, S22], [S111, S112, S122], [S112, S122, S222]],
    # symmetric under swapping the two coordinates.
    terms = (
        s22 * (s111 * s122 - s112 * s112),
        s11 * (s112 * s222 - s122 * s122),
        -s12 * (s111 * s222 - s112 * s122),
    )
    return H, terms


def riemann_2d_hessian(field, point):
    """``R_1212`` of a 2-D Hessian metric from second and third partials.

    ``R_1212 = -N / D`` with ``D = 4 (S_11 S_22 - S_12^2)`` and ``N`` the
    3x3 determinant of second/third partials.
    """
    H, terms = _hessian_2d_parts(field, point)
    metric = MetricTensor(H)
    _require_regular(metric, True)
    return -sum(terms) / (4.0 * metric.det)


def ricci_scalar_2d(field, point, strict=True):
    """Ricci scalar ``R = 2 R_1212 / det g`` of a 2-D Hessian metric."""
    p = as_point(point)
    H, terms = _hessian_2d_parts(field, p)
    metric = MetricTensor(H, field.names if len(field.names) == 2 else p.names)
    regular = _require_regular(metric, strict)
    det = metric.det
    if det == 0.0:
        return CurvatureReport(2, float("nan"), det, tuple(metric.minors()), False, float("nan"),
                               metric=metric)
    r1212 = -sum(terms) / (4.0 * det)
    scale = sum(abs(t) for t in terms) / (2.0 * det * det)
    return CurvatureReport(
        dim=2,
        ricci_scalar=2.0 * r1212 / det,
        det_g=det,
        minors=tuple(metric.minors()),
        regular=regular,
        riemann_1212=r1212,
        scale=scale,
        metric=metric,
    )


def ricci_scalar_nd(metric_field, point, dim=None, strict=True):
    """Scalar curvature ``g^bd R^a_bad`` from derivatives of a metric field."""
    g, dg, ddg = metric_derivatives(metric_field, point, max_order=2)
    if dim is not None and g.shape[0] != dim:
        raise ValueError(f"expected a {dim}-dimensional metric, got {g.shape[0]}")
    names = getattr(getattr(metric_field, "field", None), "names", None) or ()
    metric = MetricTensor(g, names if len(names) == g.shape[0] else ())
    regular = _require_regular(metric, strict)
    if metric.det == 0.0:
        return CurvatureReport(metric.dim, float("nan"), 0.0, tuple(metric.minors()), False,
                               metric=metric)
    R, scale, lowered = kernels.curvature_terms(g, dg, ddg)
    return CurvatureReport(
        dim=metric.dim,
        ricci_scalar=R,
        det_g=metric.det,
        minors=tuple(metric.minors()),
        regular=regular,
        riemann_1212=float(lowered[0, 1, 0, 1]) if metric.dim == 2 else None,
        scale=scale,
        metric=metric,
    )
