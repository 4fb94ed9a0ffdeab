"""Command-line front end.

Exit status is 0 on success, 1 for bad input and 2 when a numerical
failure (a degenerate metric where a hard value was needed) stops a command.
"""

import argparse
import contextlib
import json
import math
import sys

import numpy as np

from . import lcr, lr, network, verify
from .errors import GeometryError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2

OMEGA_ALIASES = {"pi": math.pi, "2pi50": 2.0 * math.pi * 50.0}


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; that status is reserved here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def parse_omega(text):
    key = text.strip().lower()
    if key in OMEGA_ALIASES:
        return OMEGA_ALIASES[key]
    try:
        w = float(key)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a number, 'pi' or '2pi50', got {text!r}") from None
    if not (math.isfinite(w) and w > 0):
        raise argparse.ArgumentTypeError(f"omega must be positive, got {text!r}")
    return w


def parse_range(text):
    try:
        return lcr.parse_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def clean(obj):
    """Make a report JSON-safe: numpy scalars to Python, non-finite to ``"NA"``."""
    if isinstance(obj, dict):
        return {k: clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "NA"
    return obj


def to_json(obj):
    return json.dumps(clean(obj), indent=2, sort_keys=False) + "\n"


def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".6e") if math.isfinite(v) else "NA"
    return str(v)


def render_report(rep):
    cols = ("check", "computed", "paper", "rel_error", "status")
    table = [list(cols)] + [[_fmt(r.get(c)) for c in cols] for r in rep["rows"]]
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    lines = [f"# {rep['name']}"]
    for key in ("omega", "C", "tolerance"):
        if key in rep:
            lines.append(f"# {key} = {rep[key]!r}")
    if "best" in rep:
        for route, b in rep["best"].items():
            lines.append(f"# best omega ({route} route): {b['omega']} "
                         f"(sign mismatches {b['sign_mismatches']}, "
                         f"mean |log10 ratio| {b['mean_abs_log10_ratio']:.3f})")
    if "note" in rep:
        lines.append(f"# {rep['note']}")
    for row in table:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    for r in rep["rows"]:
        if "note" in r:
            lines.append(f"# {r['check']}: {r['note']}")
    return "\n".join(lines) + "\n"


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def cmd_analyze_line(args, out):
    if args.c is None:
        v = lr.classify_lr(lr.LRState(args.r, args.l, args.omega))
        rec = {"kind": "lr", "r": args.r, "L": args.l, "omega": args.omega, **v.as_dict()}
    else:
        st = lcr.LCRState(args.r, args.l, args.c, args.omega)
        v = lcr.classify_lcr(st)
        if args.strict and not v.regular:
            raise GeometryError(f"degenerate metric at {st} (det {v.det_g:.3e})")
        rec = {"kind": "rlc", "r": args.r, "L": args.l, "C": args.c, "omega": args.omega,
               **v.as_dict()}
    out.write(to_json(rec))


def cmd_analyze_network(args, out):
    try:
        spec = network.load_network_file(args.case)
    except OSError as exc:
        raise InputError(f"cannot read {args.case}: {exc.strerror}") from None
    if args.omega is not None:
        spec = network.NetworkSpec(args.omega, spec.buses, spec.lines)
    rep = network.analyze_network(spec)
    out.write(to_json(rep) if args.format == "json" else network.render_text(rep))


def cmd_sweep(args, out):
    rows = lcr.sweep_grid(args.r, args.l, args.c, args.omega, blowup=args.blowup)
    lcr.write_grid_csv(rows, out)


def cmd_recommend(args, out):
    rng = lcr.recommend_capacitor_range(args.r, args.l, args.omega, c_max=args.c_max)
    out.write(to_json({"r": args.r, "L": args.l, "omega": args.omega, **rng.as_dict()}))


def cmd_verify(args, out):
    if args.which == "table2":
        rep = verify.table2()
    elif args.which == "limits":
        w = 1.0 if args.omega is None else args.omega
        print(f"note: limits use omega = {w!r}, C = {args.c!r}", file=sys.stderr)
        rep = verify.limits(C=args.c, omega=w)
    else:
        w = math.pi if args.omega is None else args.omega
        if args.omega is None:
            print("note: assuming omega = pi, the value that fits the printed table",
                  file=sys.stderr)
        rep = verify.REPORTS[args.which](omega=w)
    out.write(to_json(rep) if args.format == "json" else render_report(rep))


def build_parser():
    ap = _Parser(prog="linegeom", description="Hessian-metric stability analysis of transmission lines.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, omega_default=math.pi):
        p.add_argument("--omega", type=parse_omega, default=omega_default,
                       help="angular frequency: a number, 'pi' or '2pi50' (default pi)")
        p.add_argument("--output", "-o", help="output file (default stdout)")

    p = sub.add_parser("analyze-line", help="verdict for one LR or RLC component")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--c", type=float, help="capacitance; omit for an LR line")
    p.add_argument("--strict", action="store_true",
                   help="fail with status 2 when the curvature cannot be evaluated")
    common(p)
    p.set_defaults(func=cmd_analyze_line)

    p = sub.add_parser("analyze-network", help="per-line and per-bus verdicts for a case file")
    p.add_argument("case", help="JSON case file")
    p.add_argument("--format", choices=("json", "text"), default="json")
    common(p, omega_default=None)
    p.set_defaults(func=cmd_analyze_network)

    p = sub.add_parser("sweep", help="RLC grid over (L, C) as CSV")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--l", type=parse_range, required=True, help="start:stop:count")
    p.add_argument("--c", type=parse_range, required=True, help="start:stop:count")
    p.add_argument("--blowup", type=float, default=lcr.BLOWUP_THRESHOLD)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("recommend-c", help="widest fully stable capacitance interval")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--c-max", type=float, default=1.0)
    common(p)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("verify-paper", help="compare against published tables and limits")
    p.add_argument("--which", choices=sorted(verify.REPORTS), required=True)
    p.add_argument("--c", type=float, default=0.1, help="capacitance for --which limits")
    p.add_argument("--format", choices=("json", "text"), default="text")
    common(p, omega_default=None)
    p.set_defaults(func=cmd_verify)
    return ap


def run(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        with _output(args.output) as out:
            args.func(args, out)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeometryError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
