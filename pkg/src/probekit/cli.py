"""Command-line front end.

Exit codes:
    0   success (probe: target displaced)
    1   probe: target not displaced by this probe; dh-check: a jump mismatch
    2   probe: invalid probe
    64  malformed input or usage error
    65  unbounded polygon scanned without a window
    66  the requested operation is not possible (blocked trade, failed solve, ...)
    73  output file cannot be written
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from . import io as pio
from .affine import fmt, q
from .displace import ff_displaceable, probe_verdict, scan
from .errors import InvalidProbe, NeedsWindow, ProbekitError, SpecError
from .semitoric import (
    dh_jump_report,
    mutate,
    slide,
    solve_representative,
    trade,
)
from .svg import render_svg
from .systems import (
    CamParams,
    KeplerParams,
    System,
    coupled_angular_momenta,
    kepler,
    octagon_system,
    spin_oscillator,
)

EXIT_OK = 0
EXIT_NOT_DISPLACED = 1
EXIT_INVALID_PROBE = 2
EXIT_USAGE = 64
EXIT_NEEDS_WINDOW = 65
EXIT_FAILED = 66
EXIT_CANT_WRITE = 73


class _OutputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ parsing helpers


def _rational(text: str) -> Fraction:
    try:
        return q(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from exc


def _rational_list(text: str) -> tuple:
    return tuple(_rational(t) for t in text.split(","))


def _pair(text: str) -> tuple:
    vals = _rational_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y: {text!r}")
    return vals


def _int_pair(text: str) -> tuple:
    vals = _pair(text)
    if any(v.denominator != 1 for v in vals):
        raise argparse.ArgumentTypeError(f"expected integers a,b: {text!r}")
    return tuple(int(v) for v in vals)


def _signs(text: str) -> tuple:
    try:
        vals = tuple(int(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated signs: {text!r}") from exc
    if any(v not in (1, -1) for v in vals):
        raise argparse.ArgumentTypeError("signs must be 1 or -1")
    return vals


def _window(text: str) -> tuple:
    vals = _rational_list(text)
    if len(vals) not in (2, 4):
        raise argparse.ArgumentTypeError("window is x0,x1 or x0,x1,y0,y1")
    return vals


def _real(text: str) -> float:
    """Physical parameters such as t may be rationals or decimals."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise _OutputError(f"cannot write {path}: {exc}") from exc


def _node_index(system: System, i: int) -> int:
    if not 0 <= i < len(system.semitoric.nodes):
        raise SpecError(f"node index {i} out of range (0..{len(system.semitoric.nodes) - 1})")
    return i


# ------------------------------------------------------------------ commands


def cmd_probe(args) -> int:
    system = pio.load_spec(args.spec)
    try:
        verdict = probe_verdict(system.semitoric, args.start, args.dir, args.target)
    except InvalidProbe as exc:
        print(json.dumps({"status": "InvalidProbe", "reason": str(exc)}, sort_keys=True))
        return EXIT_INVALID_PROBE
    out = {"status": verdict.status.value}
    if verdict.status.displaceable:
        out["witness"] = pio.witness_to_json(verdict)
    if verdict.note:
        out["note"] = verdict.note
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK if verdict.status.displaceable else EXIT_NOT_DISPLACED


def _summary_table(report) -> str:
    rows = sorted(report.counts.items())
    width = max([len(k) for k, _ in rows] + [6])
    lines = [f"{'status':<{width}}  count"]
    lines += [f"{k:<{width}}  {v}" for k, v in rows]
    unc = report.uncertified()
    lines.append(f"uncertified points: {len(unc)}")
    lines += [f"  ({fmt(p[0])}, {fmt(p[1])})  {report.status_of(p).value}" for p in unc]
    lines.append(f"stem inference applied: {'yes' if report.stem_inference_applied else 'no'}")
    return "\n".join(lines) + "\n"


def cmd_scan(args) -> int:
    system = pio.load_spec(args.spec)
    report = scan(system.semitoric, args.res, facts=system.facts, bound=args.bound, window=args.window,
                  compact=system.compact)
    text = pio.emit_report(report, system)
    table = _summary_table(report)
    if args.out:
        _write(args.out, text)
        sys.stdout.write(table)
    else:
        sys.stdout.write(text)
        sys.stderr.write(table)
    return EXIT_OK


def cmd_render(args) -> int:
    system, marks = pio.load_any(args.input)
    _write(args.out, render_svg(system.semitoric, marks, args.window))
    return EXIT_OK


def _with_sp(system: System, sp) -> System:
    return System(sp, system.facts, system.compact, system.meta)


def cmd_mutate(args) -> int:
    system = pio.load_spec(args.spec)
    sp = mutate(system.semitoric, _node_index(system, args.node))
    _write(args.out, pio.emit_spec(_with_sp(system, sp)))
    return EXIT_OK


def cmd_slide(args) -> int:
    system = pio.load_spec(args.spec)
    sp, seg = slide(system.semitoric, _node_index(system, args.node), args.y)
    if seg is not None:
        sys.stderr.write(f"slid segment: ({fmt(seg[0][0])}, {fmt(seg[0][1])}) - ({fmt(seg[1][0])}, {fmt(seg[1][1])})\n")
    _write(args.out, pio.emit_spec(_with_sp(system, sp)))
    return EXIT_OK


def cmd_trade(args) -> int:
    system = pio.load_spec(args.spec)
    sp, (node, corner) = trade(system.semitoric, _node_index(system, args.node))
    sys.stderr.write(f"excluded segment: ({fmt(node[0])}, {fmt(node[1])}) - ({fmt(corner[0])}, {fmt(corner[1])})\n")
    _write(args.out, pio.emit_spec(_with_sp(system, sp)))
    return EXIT_OK


def cmd_dh_check(args) -> int:
    system = pio.load_spec(args.spec)
    rep = dh_jump_report(system.semitoric)
    print(f"{'x':>8}  {'jump':>8}  {'predicted':>9}  match")
    for e in rep.entries:
        print(f"{fmt(e.x):>8}  {fmt(e.jump):>8}  {fmt(e.predicted):>9}  {'yes' if e.match else 'NO'}")
    for x, reason in rep.flagged:
        print(f"{fmt(x):>8}  flagged: {reason}")
    return EXIT_OK if rep.all_match else EXIT_NOT_DISPLACED


def cmd_solve(args) -> int:
    sp = solve_representative(pio.load_combinatorics(args.input))
    _write(args.out, pio.emit_spec(System(sp, (), sp.polygon.bounded, {})))
    return EXIT_OK


def cmd_gen(args) -> int:
    name = args.name
    if name == "octagon":
        system = octagon_system(args.h, args.eps)
    elif name == "kepler":
        if args.h is None and args.t is None:
            raise SpecError("kepler needs --t or --h")
        system = kepler(KeplerParams(args.R, t=args.t, h=args.h, precision=args.precision), args.epsilon)
    elif name == "cam":
        if None in (args.R1, args.R2, args.t, args.h1):
            raise SpecError("cam needs --R1 --R2 --t --h1")
        system = coupled_angular_momenta(CamParams(args.R1, args.R2, args.t, args.h1))
    else:
        system = spin_oscillator(args.rho1, args.rho2, args.lower_slope)
    _write(args.out, pio.emit_spec(system))
    return EXIT_OK


def cmd_ff(args) -> int:
    system = pio.load_spec(args.spec)
    verdict = ff_displaceable(system.semitoric, _node_index(system, args.node))
    out = {"status": verdict.status.value}
    if verdict.status.displaceable:
        out["witness"] = pio.witness_to_json(verdict)
    if verdict.note:
        out["note"] = verdict.note
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


# ------------------------------------------------------------------ wiring


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="probekit", description="Exact probe and rectangle displaceability for semitoric polygons.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("probe", help="test one probe against a target point")
    s.add_argument("spec")
    s.add_argument("--from", dest="start", type=_pair, required=True, help="start point on a facet, x,y")
    s.add_argument("--dir", type=_int_pair, required=True, help="lattice direction a,b")
    s.add_argument("--target", type=_pair, required=True, help="target point x,y")
    s.set_defaults(func=cmd_probe)

    s = sub.add_parser("scan", help="classify a grid of fibers")
    s.add_argument("spec")
    s.add_argument("--res", type=_rational, default=Fraction(1, 4))
    s.add_argument("--bound", type=int, default=None, help="probe max-norm bound (default: PROBEKIT_BOUND or 10)")
    s.add_argument("--window", type=_window, default=None, help="x0,x1 or x0,x1,y0,y1")
    s.add_argument("--out", default=None, help="report file; without it the report goes to stdout")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("render", help="draw a spec or a report as SVG")
    s.add_argument("input")
    s.add_argument("--out", required=True)
    s.add_argument("--window", type=_window, default=None)
    s.set_defaults(func=cmd_render)

    for name, func, helptext in (("mutate", cmd_mutate, "flip the cut of one node"),
                                 ("trade", cmd_trade, "replace a node by a toric corner"),
                                 ("ff", cmd_ff, "rectangle criterion for one node")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("spec")
        s.add_argument("--node", type=int, required=True)
        if name != "ff":
            s.add_argument("--out", default=None)
        s.set_defaults(func=func)

    s = sub.add_parser("slide", help="move a node along its vertical line")
    s.add_argument("spec")
    s.add_argument("--node", type=int, required=True)
    s.add_argument("--y", type=_rational, required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_slide)

    s = sub.add_parser("dh-check", help="compare slice-width slope jumps with nodes and corners")
    s.add_argument("spec")
    s.set_defaults(func=cmd_dh_check)

    s = sub.add_parser("solve", help="build a representative from combinatorial data")
    s.add_argument("input")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("gen", help="emit the spec of a named example system")
    s.add_argument("name", choices=("octagon", "kepler", "cam", "spin"))
    s.add_argument("--h", type=_rational, default=None, help="height (octagon, kepler)")
    s.add_argument("--eps", type=_signs, default=None, help="octagon cut signs, e.g. -1,1,-1,1")
    s.add_argument("--R", type=_rational, default=Fraction(1))
    s.add_argument("--t", type=_real, default=None)
    s.add_argument("--precision", type=float, default=1e-9)
    s.add_argument("--epsilon", type=int, choices=(1, -1), default=-1)
    s.add_argument("--R1", type=_rational, default=None)
    s.add_argument("--R2", type=_rational, default=None)
    s.add_argument("--h1", type=_rational, default=None)
    s.add_argument("--rho1", type=_rational, default=Fraction(1))
    s.add_argument("--rho2", type=_rational, default=Fraction(1))
    s.add_argument("--lower-slope", type=_rational, default=Fraction(-1))
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_gen)
    return p


def _attach_negative_values(argv):
    """Let "--window -1,3" through: argparse would read "-1,3" as an option."""
    out = []
    for arg in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and re.match(r"-[\d/]", arg):
            out[-1] = f"{out[-1]}={arg}"
        else:
            out.append(arg)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_negative_values(argv))
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"probekit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NeedsWindow as exc:
        print(f"probekit: {exc}", file=sys.stderr)
        return EXIT_NEEDS_WINDOW
    except _OutputError as exc:
        print(f"probekit: {exc}", file=sys.stderr)
        return EXIT_CANT_WRITE
    except (ProbekitError, ValueError) as exc:
        print(f"probekit: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
