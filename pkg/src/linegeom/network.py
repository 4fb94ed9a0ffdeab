"""Case files, bus power sums and per-bus block metrics.

A case file is a JSON document::

    {
      "omega": 3.141592653589793,
      "buses": [{"id": "1", "v": 1.0, "delta": 0.0}, ...],
      "lines": [{"id": "T1", "from": "1", "to": "2", "r": 0.02, "l": 0.06, "c": 0.3}, ...]
    }

``omega``, ``v``, ``delta`` and ``c`` are optional.  Lines without ``c`` are
analysed as LR components, lines with ``c`` as RLC components.
"""

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from . import lcr, lr
from .errors import CaseFileError, GeometryError, SingularTransformError
from .geometry import MetricTensor, ScalarField, fd_partial, hessian_metric, principal_minors
from .published import TABLE_1, TABLE_2

DEFAULT_OMEGA = math.pi


@dataclass(frozen=True)
class BusSpec:
    id: str
    v: float = 1.0
    delta: float = 0.0


@dataclass(frozen=True)
class LineSpec:
    id: str
    from_bus: str
    to_bus: str
    r: float
    L: float
    C: Optional[float] = None

    @property
    def kind(self):
        return "lr" if self.C is None else "rlc"

    def reactance(self, omega):
        x = omega * self.L
        if self.C is not None:
            x -= 1.0 / (omega * self.C)
        return x

    def lr_state(self, omega):
        return lr.LRState(self.r, self.L, omega)

    def lcr_state(self, omega):
        return lcr.LCRState(self.r, self.L, self.C, omega)


@dataclass(frozen=True)
class NetworkSpec:
    omega: float
    buses: tuple
    lines: tuple

    def bus(self, bus_id):
        for b in self.buses:
            if b.id == bus_id:
                return b
        raise KeyError(f"unknown bus {bus_id!r}")

    def incident(self, bus_id):
        self.bus(bus_id)
        return [ln for ln in self.lines if bus_id in (ln.from_bus, ln.to_bus)]


def _number(obj, key, path, default=None, required=False):
    if key not in obj:
        if required:
            raise CaseFileError(f"missing field {path}.{key}", path=f"{path}.{key}")
        return default
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise CaseFileError(f"{path}.{key} must be a finite number, got {val!r}",
                            path=f"{path}.{key}")
    return float(val)


def _ident(obj, key, path):
    if key not in obj:
        raise CaseFileError(f"missing field {path}.{key}", path=f"{path}.{key}")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (str, int)):
        raise CaseFileError(f"{path}.{key} must be a string or integer", path=f"{path}.{key}")
    return str(val)


def _check_keys(obj, allowed, path):
    if not isinstance(obj, dict):
        raise CaseFileError(f"{path} must be an object", path=path)
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise CaseFileError(f"unknown field {path}.{extra[0]}", path=f"{path}.{extra[0]}")


def network_from_dict(doc):
    _check_keys(doc, ("omega", "buses", "lines"), "$")
    omega = _number(doc, "omega", "$", DEFAULT_OMEGA)
    if omega <= 0:
        raise CaseFileError("$.omega must be positive", path="$.omega")
    buses_raw = doc.get("buses", [])
    lines_raw = doc.get("lines", [])
    for key, val in (("buses", buses_raw), ("lines", lines_raw)):
        if not isinstance(val, list):
            raise CaseFileError(f"$.{key} must be an array", path=f"$.{key}")

    buses, seen = [], set()
    for k, b in enumerate(buses_raw):
        p = f"$.buses[{k}]"
        _check_keys(b, ("id", "v", "delta"), p)
        bid = _ident(b, "id", p)
        if bid in seen:
            raise CaseFileError(f"duplicate bus id {bid!r}", path=f"{p}.id")
        seen.add(bid)
        v = _number(b, "v", p, 1.0)
        if v <= 0:
            raise CaseFileError(f"{p}.v must be positive", path=f"{p}.v")
        buses.append(BusSpec(bid, v, _number(b, "delta", p, 0.0)))

    lines, line_ids = [], set()
    for k, ln in enumerate(lines_raw):
        p = f"$.lines[{k}]"
        _check_keys(ln, ("id", "from", "to", "r", "l", "c"), p)
        lid = _ident(ln, "id", p)
        if lid in line_ids:
            raise CaseFileError(f"duplicate line id {lid!r}", path=f"{p}.id")
        line_ids.add(lid)
        ends = []
        for key in ("from", "to"):
            bid = _ident(ln, key, p)
            if bid not in seen:
                raise CaseFileError(f"{p}.{key} refers to unknown bus {bid!r}", path=f"{p}.{key}")
            ends.append(bid)
        r = _number(ln, "r", p, required=True)
        L = _number(ln, "l", p, required=True)
        C = _number(ln, "c", p)
        if r < 0 or L < 0:
            raise CaseFileError(f"{p}: r and l must be non-negative", path=f"{p}.r" if r < 0 else f"{p}.l")
        if r == 0 and L == 0:
            raise CaseFileError(f"{p}: r = l = 0 is a short circuit", path=f"{p}.r")
        if C is not None and C <= 0:
            raise CaseFileError(
                f"{p}.c must be strictly positive: the impedance-basis transform "
                "X_C = 1/(omega C) is singular at C = 0", path=f"{p}.c")
        lines.append(LineSpec(lid, ends[0], ends[1], r, L, C))
    return NetworkSpec(omega, tuple(buses), tuple(lines))


def load_network(source, source_path=None):
    """Parse case-file text into a validated :class:`NetworkSpec`."""
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise CaseFileError(f"parse error: {exc.msg}", path=source_path,
                            line=exc.lineno, column=exc.colno) from None
    return network_from_dict(doc)


def load_network_file(path):
    with open(path, encoding="utf-8") as fh:
        return load_network(fh.read(), source_path=str(path))


def network_to_dict(spec):
    lines = []
    for ln in spec.lines:
        d = {"id": ln.id, "from": ln.from_bus, "to": ln.to_bus, "r": ln.r, "l": ln.L}
        if ln.C is not None:
            d["c"] = ln.C
        lines.append(d)
    return {
        "omega": spec.omega,
        "buses": [{"id": b.id, "v": b.v, "delta": b.delta} for b in spec.buses],
        "lines": lines,
    }


def dump_network(spec):
    return json.dumps(network_to_dict(spec), indent=2) + "\n"


def sample_network(with_capacitors=False):
    """The bundled seven-line 5-bus sample (ids T1..T7 in table order)."""
    text = resources.files("linegeom").joinpath("data/five_bus.json").read_text("utf-8")
    spec = load_network(text)
    if with_capacitors:
        caps = {row[0]: row[3] for row in TABLE_2}
        spec = NetworkSpec(spec.omega, spec.buses, tuple(
            LineSpec(ln.id, ln.from_bus, ln.to_bus, ln.r, ln.L, caps[ln.id])
            for ln in spec.lines))
    return spec


def bus_power(spec, bus_id):
    """Real and reactive power injected at a bus from its incident lines."""
    bi = spec.bus(bus_id)
    P = Q = 0.0
    for ln in spec.incident(bus_id):
        other = spec.bus(ln.to_bus if ln.from_bus == bus_id else ln.from_bus)
        x = ln.reactance(spec.omega)
        y = 1.0 / math.hypot(ln.r, x)
        theta = math.atan2(x, ln.r)
        arg = theta + other.delta - bi.delta
        P += bi.v * other.v * y * math.cos(arg)
        Q += bi.v * other.v * y * math.sin(arg)
    return {"P": P, "Q": Q}


@dataclass(frozen=True)
class Jacobian:
    matrix: np.ndarray
    det: float


def impedance_basis_jacobian(state):
    """Jacobian of ``(r, L, C) -> (r, X_L, X_C)``, or ``(r, L) -> (r, X_L)``."""
    w = state.omega
    if not w > 0:
        raise SingularTransformError(f"omega must be positive, got {w}")
    C = getattr(state, "C", None)
    if C is None:
        m = np.diag([1.0, w])
        return Jacobian(m, w)
    if C == 0:
        raise SingularTransformError("the impedance-basis transform is singular at C = 0")
    m = np.diag([1.0, w, -1.0 / (w * C * C)])
    return Jacobian(m, -1.0 / (C * C))


IMPEDANCE_COORDS = ("r", "X_L", "X_C")


def impedance_field():
    """Effective power as a field over ``(r, X_L, X_C)``.

    It depends on ``X_L - X_C`` only, so its Hessian always has the null
    direction ``(0, 1, 1)``.
    """

    def func(p):
        return lcr.impedance_power(p[:, 0], p[:, 1], p[:, 2])

    def scale(x):
        z = math.hypot(x[0], x[1] - x[2])
        return np.array([z, z, z])

    def domain(p):
        return (p[:, 0] != 0.0) | (p[:, 1] != p[:, 2])

    return ScalarField(func, 3, vectorized=True, scale=scale, domain=domain,
                       names=IMPEDANCE_COORDS)


def _impedance_point(state):
    w = state.omega
    return (state.r, w * state.L, 1.0 / (w * state.C))


def impedance_metric(state):
    return hessian_metric(impedance_field(), _impedance_point(state))


def pulled_back_metric(state):
    """Component-basis Hessian rebuilt from impedance-basis derivatives.

    ``H_comp = J^T H_imp J + S_{X_C} d^2 X_C / dC^2 e_C e_C^T``, returned in
    the ``(L, C, r)`` order.  The second term is there because ``X_C`` is
    not linear in ``C``.
    """
    jac = impedance_basis_jacobian(state).matrix
    H = impedance_metric(state).entries
    grad_xc = fd_partial(impedance_field(), _impedance_point(state), (2,)).value
    out = jac.T @ H @ jac
    out[2, 2] += grad_xc * 2.0 / (state.omega * state.C ** 3)
    perm = [1, 2, 0]
    return MetricTensor(out[np.ix_(perm, perm)], lcr.COORDS)


def covariance_check(state):
    """Compare the component-basis det with ``det(H_imp) (det J)^2``."""
    comp = lcr.lcr_det(state)
    imp = impedance_metric(state).det
    jdet = impedance_basis_jacobian(state).det
    predicted = imp * jdet ** 2
    pulled = pulled_back_metric(state).det
    return {
        "det_component": comp,
        "det_impedance": imp,
        "jacobian_det": jdet,
        "predicted": predicted,
        "rel_error": abs(predicted - comp) / abs(comp),
        "det_pulled_back": pulled,
        "pullback_rel_error": abs(pulled - comp) / abs(comp),
    }


def _line_metric(line, omega):
    if line.C is None:
        return lr.lr_metric_closed(line.lr_state(omega))
    return lcr.lcr_metric_oracle(line.lcr_state(omega))


@dataclass(frozen=True)
class BusBlockMetric:
    bus: str
    line_ids: tuple
    blocks: tuple
    assembled: np.ndarray
    minors: tuple

    @property
    def det(self):
        return self.minors[-1]

    @property
    def stable(self):
        return all(m > 0 for m in self.minors)

    def as_dict(self):
        return {
            "bus": self.bus,
            "lines": list(self.line_ids),
            "minors": list(self.minors),
            "det": self.det,
            "stable": self.stable,
        }


def assemble_blocks(blocks):
    n = sum(b.dim for b in blocks)
    out = np.zeros((n, n))
    k = 0
    for b in blocks:
        out[k:k + b.dim, k:k + b.dim] = b.entries
        k += b.dim
    return out


def bus_block_metric(spec, bus_id):
    """Block-diagonal bus metric built from the metrics of incident lines."""
    lines = spec.incident(bus_id)
    if not lines:
        raise ValueError(f"bus {bus_id!r} has no incident lines")
    blocks = tuple(_line_metric(ln, spec.omega) for ln in lines)
    assembled = assemble_blocks(blocks)
    # leading minors of a block-diagonal matrix are prefix products of block minors
    minors, prefix = [], 1.0
    for b in blocks:
        bm = principal_minors(b)
        minors.extend(prefix * m for m in bm)
        prefix *= bm[-1]
    return BusBlockMetric(bus_id, tuple(ln.id for ln in lines), blocks, assembled,
                          tuple(float(m) for m in minors))


def _line_record(line, omega):
    rec = {"id": line.id, "from": line.from_bus, "to": line.to_bus, "kind": line.kind,
           "r": line.r, "L": line.L, "C": line.C}
    try:
        if line.C is None:
            v = lr.classify_lr(line.lr_state(omega))
            rec.update({k: getattr(v, k) for k in (
                "g_rr", "g_rL", "g_LL", "det_g", "boundary_residual",
                "resistive_reliable", "joint_reliable", "globally_reliable")})
            rec["ricci_scalar"] = float(v.ricci_scalar)
            if not (v.resistive_reliable and v.joint_reliable) and line.r > 0:
                rec["boundary_L"] = v.boundary_L
        else:
            v = lcr.classify_lcr(line.lcr_state(omega))
            rec.update({k: getattr(v, k) for k in (
                "p2_surface", "det_g", "ricci_scalar",
                "surface_stable", "volume_stable", "globally_stable")})
            rec["ricci_scalar"] = float(v.ricci_scalar)
    except (GeometryError, ValueError) as exc:
        rec["error"] = str(exc)
        return rec
    _attach_published(rec, line)
    return rec


def _attach_published(rec, line):
    """Add printed table values when a line reproduces a published row."""
    if line.C is None:
        for lid, r, L, det in TABLE_1:
            if (lid, r, L) == (line.id, line.r, line.L):
                rec["paper_det_g"] = det
                rec["ratio_det_g"] = rec["det_g"] / det
    else:
        for lid, r, L, C, p2, det, R in TABLE_2:
            if (lid, r, L, C) == (line.id, line.r, line.L, line.C):
                rec.update(paper_P2=p2, paper_det_g=det, paper_R=R,
                           ratio_P2=rec["p2_surface"] / p2,
                           ratio_det_g=rec["det_g"] / det,
                           ratio_R=-rec["ricci_scalar"] / R)


def analyze_network(spec):
    """Per-line verdicts, per-bus block verdicts and equilibrium notes."""
    lines = [_line_record(ln, spec.omega) for ln in spec.lines]
    buses = []
    for b in spec.buses:
        if not spec.incident(b.id):
            continue
        try:
            buses.append(bus_block_metric(spec, b.id).as_dict())
        except (GeometryError, ValueError) as exc:
            buses.append({"bus": b.id, "error": str(exc)})
    off_eq = [b.id for b in spec.buses if b.v != 1.0]
    phases = {b.delta for b in spec.buses}
    return {
        "omega": spec.omega,
        "equilibrium": {
            "assumed": True,
            "buses_with_v_not_1": off_eq,
            "unequal_phases": len(phases) > 1,
        },
        "lines": lines,
        "buses": buses,
    }


def _cell(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return format(v, ".6e") if math.isfinite(v) else "NA"
    return str(v)


def render_text(report):
    """Aligned plain-text tables for a network report."""
    out = [f"omega = {report['omega']!r}"]
    lr_cols = ("id", "r", "L", "g_rr", "g_rL", "g_LL", "det_g",
               "resistive_reliable", "joint_reliable", "globally_reliable", "boundary_L")
    rlc_cols = ("id", "r", "L", "C", "p2_surface", "det_g", "ricci_scalar",
                "surface_stable", "volume_stable", "globally_stable")
    bus_cols = ("bus", "lines", "det", "stable")
    for title, cols, rows in (
        ("LR lines", lr_cols, [x for x in report["lines"] if x["kind"] == "lr"]),
        ("RLC lines", rlc_cols, [x for x in report["lines"] if x["kind"] == "rlc"]),
        ("buses", bus_cols, report["buses"]),
    ):
        if not rows:
            continue
        table = [list(cols)]
        for row in rows:
            cells = []
            for c in cols:
                v = row.get(c)
                cells.append(",".join(v) if isinstance(v, list) else _cell(v))
            table.append(cells)
        widths = [max(len(r[i]) for r in table) for i in range(len(cols))]
        out.append("")
        out.append(title)
        for r in table:
            out.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
        for row in rows:
            if "error" in row:
                out.append(f"  {row.get('id', row.get('bus'))}: {row['error']}")
    return "\n".join(out) + "\n"
