import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from linegeom import lcr, lr, network
from linegeom.errors import CaseFileError, SingularTransformError
from linegeom.network import BusSpec, LineSpec, NetworkSpec

from conftest import rel


def single(r, L, C=None, w=math.pi):
    return NetworkSpec(w, (BusSpec("a"), BusSpec("b")), (LineSpec("x", "a", "b", r, L, C),))


def case(lines, buses=("1", "2"), **top):
    doc = {"buses": [{"id": b} for b in buses], "lines": lines, **top}
    return json.dumps(doc)


class TestLoad:
    def test_sample(self):
        spec = network.sample_network()
        assert len(spec.lines) == 7 and len(spec.buses) == 5
        assert spec.omega == math.pi
        assert [ln.id for ln in spec.lines] == [f"T{i}" for i in range(1, 8)]
        assert all(ln.C is None for ln in spec.lines)

    def test_defaults(self):
        spec = network.load_network(case([{"id": "x", "from": "1", "to": "2", "r": 0.1, "l": 0.2}]))
        assert spec.omega == math.pi
        assert spec.buses[0] == BusSpec("1", 1.0, 0.0)

    def test_empty_lines(self):
        spec = network.load_network(case([]))
        assert spec.lines == ()
        rep = network.analyze_network(spec)
        assert rep["lines"] == [] and rep["buses"] == []

    def test_parse_error_location(self):
        with pytest.raises(CaseFileError) as exc:
            network.load_network('{\n  "buses": [\n    {"id": 1,}\n  ]\n}')
        assert exc.value.line == 3 and exc.value.column is not None
        assert "line 3" in str(exc.value)

    def test_zero_capacitance(self):
        text = case([{"id": "x", "from": "1", "to": "2", "r": 0.1, "l": 0.2, "c": 0}])
        with pytest.raises(CaseFileError) as exc:
            network.load_network(text)
        assert exc.value.path == "$.lines[0].c"
        assert "singular" in str(exc.value)

    @pytest.mark.parametrize("text,path", [
        (case([{"id": "x", "from": "1", "to": "9", "r": 0.1, "l": 0.2}]), "$.lines[0].to"),
        (case([], buses=("1", "1")), "$.buses[1].id"),
        (case([{"id": "x", "from": "1", "to": "2", "r": -0.1, "l": 0.2}]), "$.lines[0].r"),
        (case([{"id": "x", "from": "1", "to": "2", "r": 0.0, "l": 0.0}]), "$.lines[0].r"),
        (case([{"id": "x", "from": "1", "to": "2", "l": 0.2}]), "$.lines[0].r"),
        (case([{"id": "x", "from": "1", "to": "2", "r": "a", "l": 0.2}]), "$.lines[0].r"),
        (case([{"id": "x", "from": "1", "to": "2", "r": 0.1, "l": 0.2, "g": 1}]), "$.lines[0].g"),
        (case([], omega=-1), "$.omega"),
    ])
    def test_invalid(self, text, path):
        with pytest.raises(CaseFileError) as exc:
            network.load_network(text)
        assert exc.value.path == path

    def test_round_trip_bytes(self):
        text = network.dump_network(network.sample_network(with_capacitors=True))
        assert network.dump_network(network.load_network(text)) == text
        from importlib import resources
        bundled = resources.files("linegeom").joinpath("data/five_bus.json").read_text("utf-8")
        assert network.dump_network(network.load_network(bundled)) == bundled


class TestBusPower:
    def test_resistive_line(self):
        p = network.bus_power(single(0.5, 0.0), "a")
        assert p["P"] == pytest.approx(2.0) and p["Q"] == pytest.approx(0.0, abs=1e-15)

    def test_lr_reduction(self):
        p = network.bus_power(single(0.08, 0.24), "a")
        assert p["P"] == pytest.approx(0.13916, abs=1e-5)

    def test_rlc_reduction(self):
        p = network.bus_power(single(0.08, 0.24, 0.025), "a")
        assert p["P"] + p["Q"] == pytest.approx(-0.082922, abs=1e-6)

    @given(st.floats(1e-3, 1), st.floats(1e-3, 1), st.floats(0.01, 1), st.sampled_from([1.0, math.pi]))
    def test_reduction_identities(self, r, L, C, w):
        p = network.bus_power(single(r, L, None, w), "a")
        assert rel(p["P"], lr.lr_power(lr.LRState(r, L, w))) < 1e-10
        q = network.bus_power(single(r, L, C, w), "b")
        assert rel(q["P"] + q["Q"], lcr.lcr_effective_power(lcr.LCRState(r, L, C, w))) < 1e-10

    def test_phase_and_voltage(self):
        spec = NetworkSpec(1.0, (BusSpec("a", 1.1, 0.0), BusSpec("b", 0.9, 0.2)),
                           (LineSpec("x", "a", "b", 0.1, 0.3),))
        y = 1 / math.hypot(0.1, 0.3)
        th = math.atan2(0.3, 0.1)
        p = network.bus_power(spec, "a")
        assert p["P"] == pytest.approx(0.99 * y * math.cos(th + 0.2))
        assert p["Q"] == pytest.approx(0.99 * y * math.sin(th + 0.2))

    def test_unknown_bus(self):
        with pytest.raises(KeyError):
            network.bus_power(single(0.1, 0.1), "zz")


class TestJacobian:
    def test_values(self):
        j = network.impedance_basis_jacobian(lcr.LCRState(0.1, 0.1, 0.5, 7.0))
        assert j.det == pytest.approx(-4.0)
        assert np.linalg.det(j.matrix) == pytest.approx(-4.0)

    def test_omega_independent(self):
        a = network.impedance_basis_jacobian(lcr.LCRState(0.1, 0.1, 0.3, 1.0)).det
        b = network.impedance_basis_jacobian(lcr.LCRState(0.1, 0.1, 0.3, 100 * math.pi)).det
        assert a == pytest.approx(b, rel=1e-12)

    def test_lr_subcase(self):
        assert network.impedance_basis_jacobian(lr.LRState(0.1, 0.1, 3.0)).det == 3.0

    def test_singular_at_zero(self):
        class S:
            omega, C = 1.0, 0.0
        with pytest.raises(SingularTransformError):
            network.impedance_basis_jacobian(S())


class TestCovariance:
    def test_impedance_hessian_has_null_direction(self):
        s = lcr.LCRState(0.08, 0.24, 0.025, math.pi)
        H = network.impedance_metric(s).entries
        assert np.linalg.norm(H @ [0.0, 1.0, 1.0]) < 1e-8 * np.linalg.norm(H)

    @given(st.floats(0.01, 1), st.floats(0.01, 1), st.floats(0.05, 1), st.sampled_from([1.0, math.pi]))
    def test_transformation_law(self, r, L, C, w):
        c = network.covariance_check(lcr.LCRState(r, L, C, w))
        assert c["pullback_rel_error"] < 1e-6


class TestBlocks:
    def test_single_lr_line(self):
        spec = single(0.08, 0.24)
        b = network.bus_block_metric(spec, "a")
        assert np.array_equal(b.assembled, lr.lr_metric_closed(lr.LRState(0.08, 0.24)).entries)

    def test_identical_rlc_lines(self):
        ln = LineSpec("x", "a", "b", 0.08, 0.24, 0.025)
        spec = NetworkSpec(math.pi, (BusSpec("a"), BusSpec("b")), (ln, LineSpec("y", "a", "b", 0.08, 0.24, 0.025)))
        b = network.bus_block_metric(spec, "a")
        d = lcr.lcr_det(ln.lcr_state(math.pi))
        assert rel(b.det, d * d) < 1e-10
        assert rel(b.det, np.linalg.det(b.assembled)) < 1e-10

    def test_rows_two_and_three(self):
        spec = NetworkSpec(math.pi, (BusSpec("a"), BusSpec("b"), BusSpec("c")), (
            LineSpec("T2", "a", "b", 0.08, 0.24, 0.025),
            LineSpec("T3", "a", "c", 0.06, 0.18, 0.020),
        ))
        b = network.bus_block_metric(spec, "a")
        assert len(b.minors) == 6
        full = [np.linalg.det(b.assembled[:k, :k]) for k in range(1, 7)]
        assert rel(b.minors, full) < 1e-9
        assert b.stable == all(m > 0 for m in b.minors)

    @given(st.lists(st.tuples(st.floats(0.01, 1), st.floats(0.01, 1), st.floats(0.05, 1)),
                    min_size=1, max_size=3))
    def test_det_multiplicative(self, params):
        lines = tuple(LineSpec(f"l{k}", "a", "b", r, L, C) for k, (r, L, C) in enumerate(params))
        spec = NetworkSpec(1.0, (BusSpec("a"), BusSpec("b")), lines)
        b = network.bus_block_metric(spec, "a")
        prod = np.prod([blk.det for blk in b.blocks])
        assert rel(b.det, prod) < 1e-10

    def test_isolated_bus(self):
        spec = NetworkSpec(1.0, (BusSpec("a"), BusSpec("b"), BusSpec("c")),
                           (LineSpec("x", "a", "b", 0.1, 0.1),))
        with pytest.raises(ValueError):
            network.bus_block_metric(spec, "c")


class TestAnalyze:
    def test_lr_sample(self):
        rep = network.analyze_network(network.sample_network())
        assert len(rep["lines"]) == 7
        assert all(r["det_g"] < 0 for r in rep["lines"])
        assert all("boundary_L" in r for r in rep["lines"])
        assert all("paper_det_g" in r for r in rep["lines"])

    def test_with_capacitors(self):
        rep = network.analyze_network(network.sample_network(with_capacitors=True))
        for r in rep["lines"]:
            assert r["kind"] == "rlc"
            assert {"paper_P2", "paper_det_g", "paper_R", "ratio_R"} <= set(r)

    def test_deterministic_text(self):
        spec = network.sample_network(with_capacitors=True)
        a = network.render_text(network.analyze_network(spec))
        b = network.render_text(network.analyze_network(spec))
        assert a == b and "RLC lines" in a

    def test_equilibrium_notes(self):
        spec = NetworkSpec(1.0, (BusSpec("a", 1.05), BusSpec("b")), (LineSpec("x", "a", "b", 0.1, 0.1),))
        rep = network.analyze_network(spec)
        assert rep["equilibrium"]["buses_with_v_not_1"] == ["a"]
