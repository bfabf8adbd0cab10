"""Command line interface.

Exit codes: 0 sat (or propagation fixpoint), 1 unsat (or propagation found
an inconsistency), 2 unknown, 3 input error. JSON goes to stdout and
diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .algebra import path_consistency
from .boxes import RA, Rectangle
from .generate import gen_instance
from .interaction import JointNetwork, biclose
from .interval import IA
from .netfile import NetworkFileError, network_to_dict, parse_network, serialize_network
from .realize import to_svg
from .solver import (
    NotDir49Error,
    StageError,
    Verdict,
    bipath_consistency,
    check_general,
    decide_dir49,
    epsilon_solve,
)
from .topology import RCC8, H8_ENV

EXIT = {"sat": 0, "unsat": 1, "unknown": 2}
EXIT_INPUT = 3


def _q(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def _rect_json(r: Rectangle) -> dict[str, list[str]]:
    return {"x": [_q(r.x0), _q(r.x1)], "y": [_q(r.y0), _q(r.y1)]}


def verdict_json(verdict: Verdict, names: Sequence[str], svg_path: Optional[str] = None) -> dict:
    w = verdict.witness
    out: dict = {
        "status": verdict.status,
        "fragment": verdict.fragment,
        "scenario_top": network_to_dict(w.scenario_top) if w else None,
        "scenario_dir": network_to_dict(w.scenario_dir) if w else None,
        "rectangles": {n: _rect_json(r) for n, r in zip(names, w.rectangles)} if w else None,
        "chi_report": [
            {"i": c.i, "j": c.j, "axis": c.axis, "basic": c.basic, "chi": _q(c.value)}
            for c in verdict.chi_report
        ]
        if verdict.chi_report is not None
        else None,
        "trace": verdict.trace,
    }
    if svg_path is not None:
        out["svg_path"] = svg_path
    return out


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _load(path: str) -> JointNetwork:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return parse_network(text)


def _write_svg(verdict: Verdict, path: Optional[str]) -> Optional[str]:
    if path is None or verdict.witness is None or verdict.witness.regions is None:
        return None
    Path(path).write_text(to_svg(verdict.witness.regions, verdict.witness.rectangles), encoding="utf-8")
    return path


def _finish(verdict: Verdict, net: JointNetwork, svg: Optional[str] = None) -> int:
    _emit(verdict_json(verdict, net.names, _write_svg(verdict, svg)))
    return EXIT[verdict.status]


def cmd_check(args: argparse.Namespace) -> int:
    net = _load(args.file)
    return _finish(check_general(net, assume_h8=args.assume_h8), net)


def _propagation(args: argparse.Namespace, result: Optional[JointNetwork]) -> int:
    if result is None:
        _emit({"result": "inconsistent", "network": None})
        return 1
    _emit({"result": "fixpoint", "network": serialize_network(result)})
    return 0


def cmd_pc(args: argparse.Namespace) -> int:
    net = _load(args.file)
    top, dir_ = path_consistency(net.top), path_consistency(net.dir)
    return _propagation(args, JointNetwork(top, dir_) if top and dir_ else None)


def cmd_biclose(args: argparse.Namespace) -> int:
    return _propagation(args, biclose(_load(args.file)))


def cmd_bipath(args: argparse.Namespace) -> int:
    return _propagation(args, bipath_consistency(_load(args.file)))


def cmd_solve(args: argparse.Namespace) -> int:
    net = _load(args.file)
    return _finish(decide_dir49(net, witness=True, assume_h8=args.assume_h8), net, args.svg)


def cmd_realize(args: argparse.Namespace) -> int:
    net = _load(args.file)
    return _finish(decide_dir49(net, witness=True, assume_h8=args.assume_h8), net, args.svg)


def cmd_epsilon(args: argparse.Namespace) -> int:
    net = _load(args.file)
    verdict = epsilon_solve(net, Fraction(args.eps), assume_h8=args.assume_h8)
    return _finish(verdict, net, args.svg)


def cmd_gen(args: argparse.Namespace) -> int:
    if args.vars < 1:
        raise ValueError("--vars must be at least 1")
    sys.stdout.write(gen_instance(args.seed, args.vars).text)
    return 0


def cmd_tables(args: argparse.Namespace) -> int:
    calc = {"IA": IA, "RCC8": RCC8, "RA": RA}[args.calculus]
    lines = [f"# {calc.name} weak composition: row o column"]
    for a in range(calc.size):
        for b in range(calc.size):
            cell = ",".join(calc.names_of(calc.compose_basic(a, b)))
            lines.append(f"{calc.basic_names[a]}\t{calc.basic_names[b]}\t{cell}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topodir",
        description="Joint RCC8 and rectangle-relation constraint solver.",
        epilog=f"Set {H8_ENV} to use another H8 membership file.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(name: str, help_text: str, handler) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="network file, or - for stdin")
        p.add_argument("--assume-h8", action="store_true", help="skip the H8 membership check")
        p.set_defaults(handler=handler)
        return p

    with_file("check", "sound check for any rectangle constraints", cmd_check)
    with_file("pc", "path-consistency on both components", cmd_pc)
    with_file("biclose", "mutual restriction of topology and directions", cmd_biclose)
    with_file("bipath", "bipath-consistency", cmd_bipath)
    solve = with_file("solve", "complete decision for DIR49 directions, with witness", cmd_solve)
    solve.add_argument("--svg", help="write the witness regions as SVG")
    eps = with_file("epsilon", "approximate solving of a basic network", cmd_epsilon)
    eps.add_argument("--eps", default="1/100", help="precision as a rational, default 1/100")
    eps.add_argument("--svg", help="write the regions as SVG")
    realize = with_file("realize", "solve and draw the witness regions", cmd_realize)
    realize.add_argument("--svg", required=True, help="output SVG path")

    gen = sub.add_parser("gen", help="random basic network with a region witness")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--vars", type=int, required=True)
    gen.set_defaults(handler=cmd_gen)

    tables = sub.add_parser("tables", help="dump a composition table")
    tables.add_argument("--calculus", choices=("IA", "RCC8", "RA"), default="IA")
    tables.set_defaults(handler=cmd_tables)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (NetworkFileError, NotDir49Error, StageError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
