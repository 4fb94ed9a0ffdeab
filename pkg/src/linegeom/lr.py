"""Reliability geometry of a series LR line.

The effective power ``P(r, L) = r / (r^2 + w^2 L^2)`` is the real power
through the line at unit voltages and equal phases.  Its Hessian in
``(r, L)`` is everywhere indefinite and has zero scalar curvature.
"""

import math
from dataclasses import dataclass

from . import kernels
from .errors import SingularInputError
from .geometry import KernelField, MetricTensor, ParameterPoint, ricci_scalar_2d
from .published import TABLE_1, TABLE_1_ERRATA, TABLE_1_TOLERANCE

COORDS = ("r", "L")
FLATNESS_TOL = 1e-6


@dataclass(frozen=True)
class LRState:
    r: float
    L: float
    omega: float = math.pi

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.r < 0 or self.L < 0:
            raise ValueError(f"r and L must be non-negative, got r={self.r}, L={self.L}")
        if self.r == 0 and self.L == 0:
            raise SingularInputError("the LR effective power is singular at r = L = 0")

    @property
    def point(self):
        return ParameterPoint((self.r, self.L), "lr", self.omega)

    @property
    def z2(self):
        return self.r * self.r + (self.omega * self.L) ** 2


def lr_power(state):
    return state.r / state.z2


def lr_field(omega):
    """The LR effective power as a finite-difference field over ``(r, L)``."""
    return KernelField(kernels.LR_KIND, omega, COORDS)


def lr_metric_closed(state):
    r, L, w = state.r, state.L, state.omega
    q = state.z2 ** 3
    g_rr = 2.0 * r * (r * r - 3.0 * w * w * L * L) / q
    g_rL = 2.0 * w * w * L * (3.0 * r * r - w * w * L * L) / q
    g_LL = -2.0 * r * w * w * (r * r - 3.0 * w * w * L * L) / q
    return MetricTensor([[g_rr, g_rL], [g_rL, g_LL]], COORDS)


def lr_det(state):
    return -4.0 * state.omega ** 2 / state.z2 ** 3


def lr_reliability_boundary(r, omega):
    """Inductance on the curve ``r^2 = 3 w^2 L^2``; ``g_rr > 0`` below it."""
    if not (r > 0 and omega > 0):
        raise ValueError(f"r and omega must be positive, got r={r}, omega={omega}")
    return r / (math.sqrt(3.0) * omega)


@dataclass(frozen=True)
class LRVerdict:
    g_rr: float
    g_rL: float
    g_LL: float
    det_g: float
    boundary_residual: float
    resistive_reliable: bool
    joint_reliable: bool
    globally_reliable: bool
    ricci_scalar: float
    scaled_ricci: float
    boundary_L: float

    def as_dict(self):
        return dict(self.__dict__)


def classify_lr(state, flatness_tol=FLATNESS_TOL):
    g = lr_metric_closed(state)
    det = lr_det(state)
    curv = ricci_scalar_2d(lr_field(state.omega), state.point, strict=False)
    flat = curv.regular and curv.scaled_ricci < flatness_tol
    return LRVerdict(
        g_rr=g.component("r", "r"),
        g_rL=g.component("r", "L"),
        g_LL=g.component("L", "L"),
        det_g=det,
        boundary_residual=state.r ** 2 - 3.0 * (state.omega * state.L) ** 2,
        resistive_reliable=g.component("r", "r") > 0,
        joint_reliable=det > 0,
        globally_reliable=bool(flat),
        ricci_scalar=curv.ricci_scalar,
        scaled_ricci=curv.scaled_ricci,
        boundary_L=lr_reliability_boundary(state.r, state.omega) if state.r > 0 else 0.0,
    )


def _same_digits(value, printed):
    """True when ``value`` rounds to ``printed`` at its printed decimal places."""
    text = repr(float(printed))
    if "e" in text:
        return False
    places = len(text.split(".")[1])
    return round(value, places) == printed


def reproduce_table_1(omega=math.pi, tolerance=TABLE_1_TOLERANCE):
    """Recompute the published LR determinant column.

    Each row carries ``status`` ``"pass"``, ``"fail"`` or ``"erratum"``; an
    erratum row also reports the corrected-reading determinant and error.
    """
    rows = []
    for line, r, L, printed in TABLE_1:
        det = lr_det(LRState(r, L, omega))
        rel = abs(det - printed) / abs(printed)
        row = {
            "line": line, "r": r, "L": L, "det_g": det,
            "paper": printed, "rel_error": rel,
            "status": "pass" if rel <= tolerance else "fail",
            "matches_printed_digits": _same_digits(det, printed),
        }
        fix = TABLE_1_ERRATA.get(line)
        if fix is not None and rel > tolerance:
            alt = lr_det(LRState(r, fix["L"], omega))
            alt_rel = abs(alt - printed) / abs(printed)
            row.update(
                status="erratum" if alt_rel <= tolerance else "fail",
                erratum_L=fix["L"], erratum_det_g=alt, erratum_rel_error=alt_rel,
            )
        rows.append(row)
    return rows
