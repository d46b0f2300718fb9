"""Command-line front end.

    graphhybrid simulate scenario.json [-o DIR] [overrides]
    graphhybrid validate scenario.json
    graphhybrid paper-scenario fig9b [fig10 ...] [-o DIR] [--jobs N] [overrides]

Exit codes: 0 success, 1 invalid scenario, 2 runtime fault, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .glv import GLVParams, ParamError, load_params
from .hybrid import JumpError, SolverError
from .scenario import (
    PAPER_SCENARIOS,
    Scenario,
    ScenarioError,
    export_trajectory,
    load_scenario,
    paper_scenario,
    run_scenario,
    validate_scenario,
    write_manifest,
)
from .variable_basis import StateError

EXIT_OK, EXIT_INVALID, EXIT_FAULT, EXIT_USAGE = 0, 1, 2, 64
OUTPUT_ENV = "GRAPHHYBRID_OUTPUT_DIR"

log = logging.getLogger("graphhybrid")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_overrides(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("overrides (take precedence over the scenario)")
    g.add_argument("--dt", type=float)
    g.add_argument("--t-max", type=float, dest="t_max")
    g.add_argument("--t-star", type=float, dest="t_star", help="antibiotic end time (days)")
    w = g.add_mutually_exclusive_group()
    w.add_argument("--freeze-weights", action="store_const", const=True, dest="freeze_weights")
    w.add_argument("--dynamic-weights", action="store_const", const=False, dest="freeze_weights")
    g.add_argument("--disable-jminus", action="store_true")
    g.add_argument("--disable-jplus", action="store_true")
    g.add_argument("--no-antibiotic", action="store_true")
    g.add_argument("--record-every", type=int, dest="record_every")
    g.add_argument("--params", help="species parameter CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphhybrid", description="Hybrid graph-state simulator (gut microbiota gLV).")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run a scenario file")
    sim.add_argument("scenario")
    sim.add_argument("-o", "--output-dir")
    _add_overrides(sim)

    val = sub.add_parser("validate", help="check a scenario file and print violations")
    val.add_argument("scenario")

    ps = sub.add_parser("paper-scenario", help="run built-in application scenarios")
    ps.add_argument("names", nargs="+", choices=PAPER_SCENARIOS, metavar="{" + ",".join(PAPER_SCENARIOS) + "}")
    ps.add_argument("-o", "--output-dir")
    ps.add_argument("-j", "--jobs", type=int, default=1, help="run several scenarios in parallel")
    _add_overrides(ps)
    return parser


def collect_overrides(args: argparse.Namespace) -> dict:
    out = {}
    for key in ("dt", "t_max", "t_star", "freeze_weights", "record_every", "params"):
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    for key in ("disable_jminus", "disable_jplus", "no_antibiotic"):
        if getattr(args, key, False):
            out[key] = True
    return out


def apply_overrides(s: Scenario, ov: dict) -> Scenario:
    params = s.params
    source = s.params_source
    if "params" in ov:
        params = load_params(ov["params"], s.universe, alpha=params.alpha, beta=params.beta, t_star=params.t_star)
        source = str(ov["params"])
    if "t_star" in ov:
        params = GLVParams(
            params.growth, params.susceptibility, params.alpha, params.beta, ov["t_star"], params.self_interaction
        )
    jumps = s.jumps
    if ov.get("disable_jminus"):
        jumps = replace(jumps, enable_jminus=False)
    if ov.get("disable_jplus"):
        jumps = replace(jumps, enable_jplus=False)
    changes = {k: ov[k] for k in ("dt", "t_max", "freeze_weights", "record_every") if k in ov}
    if ov.get("no_antibiotic"):
        changes["antibiotic"] = False
    if "dt" in changes and changes["dt"] <= 0 or "t_max" in changes and changes["t_max"] <= 0:
        raise ValueError("--dt and --t-max must be positive")
    return replace(s, params=params, params_source=source, jumps=jumps, **changes)


def _default_out(name: str) -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "output")) / name


def _run_one(s: Scenario, out_dir: Path, overrides: dict) -> dict:
    result = run_scenario(s)
    export_trajectory(result.arc, out_dir)
    write_manifest(out_dir / "run_manifest.json", s, overrides, result.summary)
    return result.summary


def _report(summary: dict, out_dir: Path) -> None:
    trace = " -> ".join(str(d) for d in summary["dimension_trace"])
    print(f"{summary['name']}: {summary['samples']} samples, {len(summary['jumps'])} jumps, dims {trace} -> {out_dir}")
    for w in summary["warnings"]:
        print(f"  warning: {w}")


def _builtin_job(name: str, out_dir: str, overrides: dict) -> dict:
    s = apply_overrides(paper_scenario(name), overrides)
    return _run_one(s, Path(out_dir), overrides)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )

    if args.command == "validate":
        path = Path(args.scenario)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return EXIT_INVALID
        problems = validate_scenario(raw, path.parent)
        for p in problems:
            print(p)
        if not problems:
            print(f"{path}: ok")
        return EXIT_INVALID if problems else EXIT_OK

    overrides = collect_overrides(args)
    try:
        if args.command == "simulate":
            s = apply_overrides(load_scenario(args.scenario), overrides)
            out_dir = Path(args.output_dir) if args.output_dir else _default_out(s.name)
            _report(_run_one(s, out_dir, overrides), out_dir)
            return EXIT_OK

        base = Path(args.output_dir) if args.output_dir else Path(os.environ.get(OUTPUT_ENV, "output"))
        dirs = {name: base / name for name in args.names}
        if args.jobs > 1 and len(args.names) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                futures = {n: pool.submit(_builtin_job, n, str(dirs[n]), overrides) for n in args.names}
                summaries = {n: f.result() for n, f in futures.items()}
        else:
            summaries = {n: _builtin_job(n, str(dirs[n]), overrides) for n in args.names}
        for n in args.names:
            _report(summaries[n], dirs[n])
        return EXIT_OK
    except (ScenarioError, ParamError) as exc:
        for line in getattr(exc, "violations", [str(exc)]):
            print(line, file=sys.stderr)
        return EXIT_INVALID
    except (SolverError, JumpError, StateError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAULT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
