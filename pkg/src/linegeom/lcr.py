"""Voltage-stability geometry of a series RLC line.

The effective power is ``S = (r + X) / (r^2 + X^2)`` with
``X = w L - 1/(w C)``, differentiated in the coordinate order ``(L, C, r)``
so that the LC-surface minor is the leading 2x2 principal minor.

All verdicts are computed from the finite-difference Hessian
(:func:`lcr_metric_oracle`).  The closed-form component list in
:func:`lcr_metric_closed` is kept verbatim for reconciliation and is never
used for classification.
"""

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import SingularConfigurationError, SingularInputError
from .geometry import (
    FunctionMetricField,
    HessianMetricField,
    KernelField,
    MetricTensor,
    ParameterPoint,
    hessian_metric,
    ricci_scalar_nd,
)
from .published import TABLE_2

COORDS = ("L", "C", "r")
BLOWUP_THRESHOLD = 1e6
RECONCILE_TOL = 1e-4
OMEGA_REGIMES = {"1": 1.0, "pi": math.pi, "2pi50": 2.0 * math.pi * 50.0}

GRID_COLUMNS = (
    "L", "C", "P2", "det_g", "R",
    "surface_stable", "volume_stable", "globally_stable", "singular_flag",
)
NA = "NA"

_STATUS_FLAGS = {
    kernels.OK: "",
    kernels.SINGULAR_INPUT: "singular_input",
    kernels.DEGENERATE: "degenerate",
    kernels.FD_FAILURE: "fd_failure",
}


@dataclass(frozen=True)
class LCRState:
    r: float
    L: float
    C: float
    omega: float = math.pi

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.C > 0:
            raise SingularInputError(f"C must be strictly positive, got {self.C}")
        if self.r < 0 or self.L < 0:
            raise ValueError(f"r and L must be non-negative, got r={self.r}, L={self.L}")
        if self.r == 0 and self.reactance == 0:
            raise SingularInputError("r = 0 at resonance: the effective power has a pole")

    @property
    def reactance(self):
        return self.omega * self.L - 1.0 / (self.omega * self.C)

    @property
    def point(self):
        return ParameterPoint((self.L, self.C, self.r), "component", self.omega)


def impedance_power(r, x_l, x_c):
    """Effective power in the impedance basis ``(r, X_L, X_C)``."""
    x = x_l - x_c
    return (r + x) / (r * r + x * x)


def lcr_effective_power(state):
    x = state.reactance
    return (state.r + x) / (state.r ** 2 + x * x)


def lcr_field(omega):
    return KernelField(kernels.LCR_KIND, omega, COORDS)


def lcr_metric_oracle(state):
    """Finite-difference Hessian of the effective power in ``(L, C, r)``."""
    return hessian_metric(lcr_field(state.omega), state.point)


def lcr_metric_closed(state):
    """The six published closed-form metric components, transcribed as printed."""
    r, L, C, w = state.r, state.L, state.C, state.omega
    den = (r**2 * w**2 * C**2 + w**4 * L**2 * C**2 - 2 * w**2 * L * C + 1) ** 3
    a = (
        r**3 * w**3 * C**3 - 3 * r * w**5 * C**3 * L**2 + 6 * r * w**3 * C**2 * L
        - 3 * r * w * C + 3 * r**2 * w**4 * C**3 * L - 3 * r**2 * w**2 * C**2
        - w**6 * L**3 * C**3 + 3 * w**4 * L**2 * C**2 - 3 * w**2 * L * C + 1
    )
    b = (
        r**3 * w**3 * C**3 - 3 * r * w**5 * C**3 * L**2 + 6 * r * w**3 * C**2 * L
        - 3 * r * w * C - 3 * r**2 * w**4 * C**3 * L + 3 * r**2 * w**2 * C**2
        + w**6 * L**3 * C**3 - 3 * w**4 * L**2 * C**2 + 3 * w**2 * L * C - 1
    )
    c = (
        w * L - r - 3 * r**2 * w * C + 3 * w**5 * C**2 * L**3 + 3 * r**3 * w**2 * C**2
        + 3 * r**2 * w**3 * C**2 * L + 3 * r * w**4 * C**2 * L**2 - 2 * r * w**6 * L**3 * C**3
        - 2 * r**3 * w**4 * C**3 * L - 3 * w**3 * L**2 * C - w**7 * C**3 * L**4
        + r**4 * w**3 * C**3
    )
    g_rr = 2 * w**3 * C**3 * a / den
    g_rL = -2 * w**4 * C**3 * b / den
    g_rC = -2 * w**2 * C * b / den
    g_LL = -2 * w**3 * C * a / den
    g_LC = -2 * w**3 * C * a / den
    g_CC = -2 * w**2 * c / den
    return MetricTensor(
        [[g_LL, g_LC, g_rL], [g_LC, g_CC, g_rC], [g_rL, g_rC, g_rr]], COORDS
    )


def printed_metric_field(omega):
    """The closed-form component list as a metric field over ``(L, C, r)``."""

    def func(x):
        L, C, r = x
        return lcr_metric_closed(_unchecked_state(r, L, C, omega)).entries

    return FunctionMetricField(func, COORDS, scale=lambda x: kernels.field_scales(
        kernels.LCR_KIND, x, omega))


def _unchecked_state(r, L, C, omega):
    s = object.__new__(LCRState)
    for k, v in (("r", r), ("L", L), ("C", C), ("omega", omega)):
        object.__setattr__(s, k, float(v))
    return s


def reconcile_metric(state, rel_tol=RECONCILE_TOL):
    """Compare every closed-form component with the oracle."""
    closed = lcr_metric_closed(state)
    oracle = lcr_metric_oracle(state)
    out = []
    for i, a in enumerate(COORDS):
        for j in range(i, 3):
            b = COORDS[j]
            printed = float(closed[i, j])
            ref = float(oracle[i, j])
            denom = max(abs(ref), 1e-300)
            rel = abs(printed - ref) / denom
            out.append({
                "entry": f"g_{a}{b}", "printed": printed, "oracle": ref,
                "rel_diff": rel, "agrees": rel <= rel_tol,
            })
    return out


def printed_surface_minor_r0(L, C, omega):
    """The published ``r = 0`` LC-surface minor, transcribed as printed."""
    w = omega
    poly = (
        1 - 20 * w**6 * L**3 * C**3 - 20 * w**8 * L**3 * C**5 + 15 * w**10 * L**4 * C**6
        + 15 * w**8 * L**4 * C**4 - 6 * w**4 * C**3 * L - 6 * w**10 * L**5 * C**5 - 6 * w**2 * L * C
        - 6 * w**12 * L**5 * C**7 + 15 * w**4 * L**2 * C**2 + 15 * w**6 * L**2 * C**4
        + w**14 * L**6 * C**8 + w**12 * L**6 * C**6 + w**2 * C**2
    )
    return -4 * w**6 * C**4 * poly / (1 + w**4 * L**2 * C**2 - 2 * w**2 * L * C) ** 6


def printed_limit_det(C, omega):
    """Published ``L = r = 0`` determinant ``8 (1 - 3 w^2 C^2) w^7 C^3``."""
    return 8.0 * (1.0 - 3.0 * omega**2 * C**2) * omega**7 * C**3


def printed_limit_ricci(C, omega):
    """Published ``L = r = 0`` curvature, in its own (opposite) sign convention."""
    wc = omega * C
    return 0.5 * (-6.0 + 25.0 * wc**2 - 51.0 * wc**4) / ((1.0 - 3.0 * wc**2) ** 2 * wc)


def oracle_limit_det(C, omega):
    """Exact ``L = r = 0`` value of the Hessian determinant: ``-16 w^9 C^5``."""
    return -16.0 * omega**9 * C**5


def lc_surface_minor(state):
    return lcr_metric_oracle(state).minors()[1]


def lcr_det(state):
    return lcr_metric_oracle(state).det


def lcr_scalar_curvature(state, strict=True):
    """Scalar curvature of the oracle metric via the general pipeline."""
    return ricci_scalar_nd(HessianMetricField(lcr_field(state.omega)), state.point, dim=3,
                           strict=strict)


@dataclass(frozen=True)
class LCRVerdict:
    metric: MetricTensor
    p2_surface: float
    det_g: float
    ricci_scalar: float
    surface_stable: bool
    volume_stable: bool
    globally_stable: bool
    regular: bool = True

    def as_dict(self):
        return {
            "metric": self.metric.entries.tolist(),
            "coordinate_order": list(self.metric.coordinate_order),
            "p2_surface": self.p2_surface,
            "det_g": self.det_g,
            "ricci_scalar": self.ricci_scalar,
            "surface_stable": self.surface_stable,
            "volume_stable": self.volume_stable,
            "globally_stable": self.globally_stable,
            "regular": self.regular,
        }


def classify_lcr(state, blowup=BLOWUP_THRESHOLD):
    metric = lcr_metric_oracle(state)
    minors = metric.minors()
    try:
        ricci = lcr_scalar_curvature(state).ricci_scalar
        regular = True
    except SingularConfigurationError:
        ricci, regular = float("nan"), False
    return LCRVerdict(
        metric=metric,
        p2_surface=minors[1],
        det_g=minors[2],
        ricci_scalar=ricci,
        surface_stable=minors[1] > 0,
        volume_stable=minors[2] > 0,
        globally_stable=bool(regular and math.isfinite(ricci) and abs(ricci) < blowup),
        regular=regular,
    )


def parse_range(text):
    """``start:stop:count`` with inclusive endpoints."""
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise ValueError(f"range must look like start:stop:count, got {text!r}") from None
    if count < 1:
        raise ValueError(f"range count must be >= 1, got {count}")
    return np.linspace(start, stop, count)


def sweep_grid(r, L_values, C_values, omega, blowup=BLOWUP_THRESHOLD):
    """Evaluate minors, determinant and curvature on an L-major grid.

    Returns a list of dicts keyed by :data:`GRID_COLUMNS`; cells that could
    not be evaluated carry ``nan`` numbers and a non-empty ``singular_flag``.
    """
    L_values = np.asarray(L_values, dtype=float)
    C_values = np.asarray(C_values, dtype=float)
    if np.any(L_values < 0) or np.any(C_values <= 0) or r < 0:
        raise ValueError("L and r must be non-negative and C strictly positive")
    LL, CC = np.meshgrid(L_values, C_values, indexing="ij")
    pts = np.column_stack([LL.ravel(), CC.ravel(), np.full(LL.size, float(r))])
    p2, det, ricci, _, status = kernels.grid(kernels.LCR_KIND, pts, omega)
    rows = []
    for k in range(pts.shape[0]):
        R = float(ricci[k])
        rows.append({
            "L": float(pts[k, 0]),
            "C": float(pts[k, 1]),
            "P2": float(p2[k]),
            "det_g": float(det[k]),
            "R": R,
            "surface_stable": bool(p2[k] > 0),
            "volume_stable": bool(det[k] > 0),
            "globally_stable": bool(status[k] == kernels.OK and abs(R) < blowup),
            "singular_flag": _STATUS_FLAGS[int(status[k])],
        })
    return rows


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".16e") if math.isfinite(v) else NA
    return str(v)


def write_grid_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(GRID_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in GRID_COLUMNS])


@dataclass(frozen=True)
class CapacitorRange:
    lo: Optional[float]
    hi: Optional[float]
    resolution: float

    @property
    def empty(self):
        return self.lo is None

    def as_dict(self):
        return {"lo": self.lo, "hi": self.hi, "resolution": self.resolution,
                "empty": self.empty}


def recommend_capacitor_range(r, L, omega, c_max=1.0, resolution=1e-3,
                              blowup=BLOWUP_THRESHOLD):
    """Widest C-interval where surface, volume and global stability all hold."""
    cs = np.arange(1, int(round(c_max / resolution)) + 1) * resolution
    rows = sweep_grid(r, [L], cs, omega, blowup)
    good = [row["surface_stable"] and row["volume_stable"] and row["globally_stable"]
            for row in rows]
    best, start = (0, None), None
    for k, ok in enumerate(good + [False]):
        if ok and start is None:
            start = k
        elif not ok and start is not None:
            if k - start > best[0]:
                best = (k - start, (start, k - 1))
            start = None
    if best[1] is None:
        return CapacitorRange(None, None, resolution)
    i, j = best[1]
    return CapacitorRange(float(cs[i]), float(cs[j]), resolution)


def _printed_route(state):
    field_ = printed_metric_field(state.omega)
    m = lcr_metric_closed(state)
    minors = m.minors()
    try:
        R = ricci_scalar_nd(field_, state.point, dim=3).ricci_scalar
    except SingularConfigurationError:
        R = float("nan")
    return minors[1], minors[2], R


def _ratio(a, b):
    return a / b if b else float("nan")


def reproduce_table_2(omegas=None):
    """Compare computed (P2, det, R) per line against the published table.

    Two routes are reported for each candidate ``omega``: the oracle Hessian
    and the printed closed-form component list.  Curvatures are compared
    after flipping to the published sign convention.  Non-gating.
    """
    omegas = dict(OMEGA_REGIMES if omegas is None else omegas)
    report = {"rows": [], "best": {}}
    scores = {}
    for line, r, L, C, p2_pub, det_pub, R_pub in TABLE_2:
        for label, w in omegas.items():
            st = LCRState(r, L, C, w)
            v = classify_lcr(st)
            routes = {
                "oracle": (v.p2_surface, v.det_g, v.ricci_scalar),
                "printed": _printed_route(st),
            }
            for route, (p2, det, R) in routes.items():
                R_pub_sign = -R
                cells = {
                    "P2": _ratio(p2, p2_pub),
                    "det_g": _ratio(det, det_pub),
                    "R": _ratio(R_pub_sign, R_pub),
                }
                report["rows"].append({
                    "line": line, "omega": label, "route": route,
                    "P2": p2, "det_g": det, "R": R, "R_published_sign": R_pub_sign,
                    "paper_P2": p2_pub, "paper_det_g": det_pub, "paper_R": R_pub,
                    "ratios": cells,
                })
                s = scores.setdefault((route, label), [0, 0.0])
                for q in cells.values():
                    if not (math.isfinite(q) and q > 0):
                        s[0] += 1
                    else:
                        s[1] += abs(math.log10(q))
    for route in ("oracle", "printed"):
        ranked = sorted(
            ((scores[(route, lab)][0], scores[(route, lab)][1], lab) for lab in omegas),
        )
        sign_miss, logerr, lab = ranked[0]
        report["best"][route] = {
            "omega": lab, "sign_mismatches": sign_miss,
            "mean_abs_log10_ratio": logerr / (3 * len(TABLE_2)),
        }
    return report


@dataclass
class LimitStudy:
    C: float
    omega: float
    offsets: list
    det: list = field(default_factory=list)
    ricci: list = field(default_factory=list)
    printed_det: list = field(default_factory=list)
    printed_ricci: list = field(default_factory=list)

    def extrapolated(self, values):
        """Linear Richardson extrapolation to zero offset from the last two points."""
        e1, e2 = self.offsets[-2], self.offsets[-1]
        v1, v2 = values[-2], values[-1]
        return v2 + (v2 - v1) * e2 / (e1 - e2)


def observed_order(offsets, values, limit):
    """Least-squares slope of log|value - limit| against log(offset)."""
    errs = np.abs(np.asarray(values, dtype=float) - limit)
    eps = np.asarray(offsets, dtype=float)
    keep = errs > 0
    if keep.sum() < 2:
        return float("inf")
    slope, _ = np.polyfit(np.log(eps[keep]), np.log(errs[keep]), 1)
    return float(slope)


def limit_study(C, omega, offsets=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5)):
    """Approach ``L = r = 0`` along ``L = r = eps`` for both metric routes."""
    study = LimitStudy(C, omega, list(offsets))
    pf = printed_metric_field(omega)
    for eps in offsets:
        st = LCRState(eps, eps, C, omega)
        try:
            rep = lcr_scalar_curvature(st)
            study.det.append(rep.det_g)
            study.ricci.append(rep.ricci_scalar)
        except SingularConfigurationError as exc:
            study.det.append(exc.det if exc.det is not None else float("nan"))
            study.ricci.append(float("nan"))
        study.printed_det.append(lcr_metric_closed(st).det)
        try:
            study.printed_ricci.append(ricci_scalar_nd(pf, st.point, dim=3).ricci_scalar)
        except SingularConfigurationError:
            study.printed_ricci.append(float("nan"))
    return study
