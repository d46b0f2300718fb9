"""Scenario files, built-in microbiota runs and trajectory export."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Any, Mapping

from .embedding import phi
from .glv import (
    LAMBDA,
    UNIVERSE,
    GLVParams,
    ParamError,
    antibiotic_u,
    bacteriotherapy_schedule,
    build_initial_state,
    glv_flow,
    load_params,
)
from .graph_core import graph_from_literal, validate
from .hybrid import (
    Disturbance,
    HybridArc,
    JumpCase,
    JumpConfig,
    ScheduledInput,
    solve,
)
from .variable_basis import BasisSet, State

log = logging.getLogger(__name__)

MODES = {"add": JumpCase.RISE_EXTERNAL, "retain": JumpCase.FALL_EXTERNAL}


class ScenarioError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Scenario:
    name: str
    universe: BasisSet
    initial: State
    params: GLVParams
    jumps: JumpConfig
    schedule: tuple[ScheduledInput, ...] = ()
    modes: tuple[str, ...] = ()
    t_max: float = 700.0
    dt: float = 0.01
    freeze_weights: bool = True
    antibiotic: bool = True
    record_every: int = 1
    k_max: int = 1000
    params_source: str = "bundled"

    def resolved(self) -> dict[str, Any]:
        """JSON-ready description of the effective configuration."""
        return {
            "name": self.name,
            "universe": list(self.universe.labels),
            "initial_basis": list(self.initial.basis.labels),
            "params": {
                "source": self.params_source,
                "alpha": self.params.alpha,
                "beta": self.params.beta,
                "t_star": self.params.t_star,
            },
            "jump_config": {
                "lambda": self.jumps.lam,
                "kappa": None if math.isinf(self.jumps.kappa) else self.jumps.kappa,
                "xi_plus": self.jumps.xi_plus,
                "xi_minus": self.jumps.xi_minus,
                "enable_jminus": self.jumps.enable_jminus,
                "enable_jplus": self.jumps.enable_jplus,
            },
            "schedule": [
                {"t": s.t, "basis": list(s.state.basis.labels), "mode": m}
                for s, m in zip(self.schedule, self.modes)
            ],
            "sim": {
                "t_max": self.t_max,
                "dt": self.dt,
                "freeze_weights": self.freeze_weights,
                "antibiotic": self.antibiotic,
                "record_every": self.record_every,
                "k_max": self.k_max,
            },
        }


def _graph_problems(lit: Any, where: str, universe: set[int] | None) -> list[str]:
    if not isinstance(lit, Mapping):
        return [f"{where}: expected a graph object with 'vertices' and 'edges'"]
    problems = [f"{where}: {p}" for p in validate(lit)]
    if universe is not None and not problems:
        outside = sorted({int(v["id"]) for v in lit.get("vertices", [])} - universe)
        if outside:
            problems.append(f"{where}: labels {outside} are outside the universe")
    return problems


def validate_scenario(raw: Mapping[str, Any], base_dir: Path | None = None) -> list[str]:
    """Every problem found in a raw scenario mapping; empty when it can be run."""
    problems: list[str] = []
    uni_raw = raw.get("universe", list(UNIVERSE.labels))
    try:
        universe = {int(i) for i in uni_raw}
    except (TypeError, ValueError):
        problems.append("universe: expected a list of integer labels")
        universe = None
    if "initial_state" not in raw:
        problems.append("initial_state: missing")
    else:
        problems += _graph_problems(raw["initial_state"], "initial_state", universe)

    sim = raw.get("sim", {})
    t_max = sim.get("t_max", 700.0)
    try:
        if not float(t_max) > 0:
            problems.append("sim.t_max: must be positive")
        if not float(sim.get("dt", 0.01)) > 0:
            problems.append("sim.dt: must be positive")
        if int(sim.get("record_every", 1)) < 1:
            problems.append("sim.record_every: must be >= 1")
    except (TypeError, ValueError) as exc:
        problems.append(f"sim: non-numeric value ({exc})")
        t_max = math.inf

    last = -math.inf
    for i, entry in enumerate(raw.get("schedule", [])):
        where = f"schedule[{i}]"
        try:
            t = float(entry["t"])
        except (KeyError, TypeError, ValueError):
            problems.append(f"{where}: missing or non-numeric 't'")
            continue
        if not 0 <= t <= float(t_max):
            problems.append(f"{where}: time {t} outside [0, t_max]")
        if t <= last:
            problems.append(f"{where}: times must be strictly increasing")
        last = t
        if entry.get("mode", "add") not in MODES:
            problems.append(f"{where}: mode must be 'add' or 'retain'")
        problems += _graph_problems(entry.get("input"), f"{where}.input", universe)

    jc = raw.get("jump_config", {})
    try:
        _jump_config(jc)
    except (TypeError, ValueError) as exc:
        problems.append(f"jump_config: {exc}")

    if universe is not None:
        try:
            _params(raw.get("params", {}), base_dir, BasisSet(tuple(universe)))
        except (OSError, ParamError, TypeError, ValueError) as exc:
            problems.append(f"params: {exc}")
    return problems


def _jump_config(jc: Mapping[str, Any]) -> JumpConfig:
    kappa = jc.get("kappa")
    return JumpConfig(
        kappa=math.inf if kappa is None else float(kappa),
        lam=float(jc.get("lambda", LAMBDA)),
        xi_plus=float(jc.get("xi_plus", 0.0)),
        xi_minus=float(jc.get("xi_minus", 0.0)),
        enable_jplus=bool(jc.get("enable_jplus", False)),
        enable_jminus=bool(jc.get("enable_jminus", True)),
    )


def _params(section: Mapping[str, Any], base_dir: Path | None, universe: BasisSet):
    path = section.get("file")
    if path is not None:
        path = Path(path)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
    overrides = {k: float(section[k]) for k in ("alpha", "beta", "t_star") if k in section}
    return load_params(path, universe, **overrides), str(path) if path else "bundled"


def scenario_from_dict(raw: Mapping[str, Any], base_dir: Path | None = None, name: str = "scenario") -> Scenario:
    """Build a :class:`Scenario` from its JSON mapping.

    :raises ScenarioError: listing every violation
    """
    problems = validate_scenario(raw, base_dir)
    if problems:
        raise ScenarioError(problems)
    universe = BasisSet(tuple(raw.get("universe", UNIVERSE.labels)))
    params, source = _params(raw.get("params", {}), base_dir, universe)
    sim = raw.get("sim", {})
    schedule = tuple(
        ScheduledInput(float(e["t"]), phi(graph_from_literal(e["input"])), e.get("name", ""))
        for e in raw.get("schedule", [])
    )
    return Scenario(
        name=raw.get("name", name),
        universe=universe,
        initial=phi(graph_from_literal(raw["initial_state"])),
        params=params,
        jumps=_jump_config(raw.get("jump_config", {})),
        schedule=schedule,
        modes=tuple(e.get("mode", "add") for e in raw.get("schedule", [])),
        t_max=float(sim.get("t_max", 700.0)),
        dt=float(sim.get("dt", 0.01)),
        freeze_weights=bool(sim.get("freeze_weights", True)),
        antibiotic=bool(sim.get("antibiotic", True)),
        record_every=int(sim.get("record_every", 1)),
        k_max=int(sim.get("k_max", 1000)),
        params_source=source,
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"{path}: invalid JSON ({exc})"]) from None
    return scenario_from_dict(raw, path.parent, name=path.stem)


PAPER_SCENARIOS = ("fig8a", "fig8b", "fig9a", "fig9b", "fig10")


def paper_scenario(name: str, params: GLVParams | None = None, record_every: int = 10) -> Scenario:
    """Built-in microbiota runs.

    ``fig8a``/``fig8b``: fixed topology and weights, without/with antibiotic.
    ``fig9a``/``fig9b``: antibiotic then bacteriotherapy, frozen weights,
    pruning off/on. ``fig10``: as ``fig9b`` with weight dynamics.
    """
    if name not in PAPER_SCENARIOS:
        raise ValueError(f"unknown paper scenario {name!r}; choose from {', '.join(PAPER_SCENARIOS)}")
    params = params or load_params()
    base = Scenario(
        name=name,
        universe=UNIVERSE,
        initial=build_initial_state(),
        params=params,
        jumps=JumpConfig(lam=LAMBDA, enable_jminus=False, enable_jplus=False),
        t_max=300.0,
        dt=0.01,
        freeze_weights=True,
        antibiotic=False,
        record_every=record_every,
    )
    if name == "fig8a":
        return base
    if name == "fig8b":
        return replace(base, antibiotic=True)
    schedule = tuple(bacteriotherapy_schedule(params.self_interaction))
    hybrid = replace(
        base, antibiotic=True, schedule=schedule, modes=("add", "add", "retain"), t_max=700.0
    )
    if name == "fig9a":
        return hybrid
    pruning = replace(hybrid, jumps=replace(hybrid.jumps, enable_jminus=True))
    if name == "fig9b":
        return pruning
    return replace(pruning, freeze_weights=False)


@dataclass
class RunResult:
    scenario: Scenario
    arc: HybridArc
    summary: dict[str, Any] = field(default_factory=dict)


def disturbance_for(s: Scenario) -> Disturbance:
    if s.antibiotic:
        t_star = s.params.t_star
        return Disturbance(partial(antibiotic_u, t_star=t_star), (t_star,), s.schedule)
    return Disturbance(schedule=s.schedule)


def run_scenario(s: Scenario) -> RunResult:
    """Solve the hybrid system described by ``s`` and summarize the arc."""
    arc = solve(
        glv_flow(s.params, s.freeze_weights),
        s.initial,
        disturbance_for(s),
        s.jumps,
        t_max=s.t_max,
        k_max=s.k_max,
        dt=s.dt,
        record_every=s.record_every,
    )
    warnings = []
    by_time = {inp.t: m for inp, m in zip(s.schedule, s.modes)}
    for j in arc.jumps:
        if j.case.external and j.tau in by_time and MODES[by_time[j.tau]] is not j.case:
            msg = f"input at t={j.tau} declared '{by_time[j.tau]}' but classified {j.case.value}"
            log.warning(msg)
            warnings.append(msg)
    summary = {
        "name": s.name,
        "samples": arc.n_samples,
        "truncated": arc.truncated,
        "segments": [
            {"k": seg.k, "start": seg.start, "end": seg.end, "dim": len(seg.basis), "basis": list(seg.basis.labels)}
            for seg in arc.segments
        ],
        "jumps": [
            {"tau": j.tau, "k": j.k, "case": j.case.value, "dim_before": j.pre.dim, "dim_after": j.post.dim}
            for j in arc.jumps
        ],
        "dimension_trace": arc.segment_dims(),
        "warnings": warnings,
    }
    return RunResult(s, arc, summary)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def export_trajectory(arc: HybridArc, out_dir: str | Path) -> dict[str, Path]:
    """Write ``vertices.csv``, ``edges.csv``, ``dimension.csv`` and ``jumps.csv``.

    Edge rows cover every pair of the basis square with its adjacency bit.
    Output is byte-identical for identical arcs.
    """
    if not arc.segments:
        raise ValueError("cannot export an empty arc")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.csv" for name in ("vertices", "edges", "dimension", "jumps")}
    opts = dict(encoding="utf-8", newline="")
    with (
        paths["vertices"].open("w", **opts) as fv,
        paths["edges"].open("w", **opts) as fe,
        paths["dimension"].open("w", **opts) as fd,
    ):
        wv, we, wd = (csv.writer(f, lineterminator="\n") for f in (fv, fe, fd))
        wv.writerow(["t", "k", "label", "attribute"])
        we.writerow(["t", "k", "from", "to", "weight", "adjacency"])
        wd.writerow(["t", "k", "basis_size"])
        for seg in arc.segments:
            labels = seg.basis.labels
            n = len(labels)
            adj = seg.a.astype(int)
            for i, t in enumerate(seg.t):
                ts = _fmt(t)
                wd.writerow([ts, seg.k, n])
                xs = seg.x[i]
                for p in range(n):
                    wv.writerow([ts, seg.k, labels[p], _fmt(xs[p])])
                ws = seg.w[i]
                for p in range(n):
                    for q in range(n):
                        we.writerow([ts, seg.k, labels[p], labels[q], _fmt(ws[p, q]), adj[p, q]])
    with paths["jumps"].open("w", **opts) as fj:
        wj = csv.writer(fj, lineterminator="\n")
        wj.writerow(["tau", "k", "case"])
        for j in arc.jumps:
            wj.writerow([_fmt(j.tau), j.k, j.case.value])
    return paths


def write_manifest(path: str | Path, s: Scenario, overrides: Mapping[str, Any], summary: Mapping[str, Any]) -> Path:
    path = Path(path)
    doc = {"scenario": s.resolved(), "overrides": dict(overrides), "summary": dict(summary)}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


__all__ = [
    "PAPER_SCENARIOS",
    "RunResult",
    "Scenario",
    "ScenarioError",
    "disturbance_for",
    "export_trajectory",
    "load_scenario",
    "paper_scenario",
    "run_scenario",
    "scenario_from_dict",
    "validate_scenario",
    "write_manifest",
]
