"""Hybrid flow/jump solver on graph states.

The state flows under a fixed-step RK4 scheme while its basis and adjacency
stay frozen, and jumps whenever a scheduled external input arrives or an
intrinsic threshold set is entered. Each jump starts a new segment of the
hybrid arc with the jump counter ``k`` incremented.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Callable, Iterable, Sequence

import numpy as np

from .variable_basis import (
    BasisSet,
    State,
    StateError,
    empty_state,
    state_combine,
    state_scalar_mul,
    unit_state,
    validate_state,
)

log = logging.getLogger(__name__)

ArrayRhs = Callable[..., np.ndarray]


class JumpCase(str, Enum):
    RISE_EXTERNAL = "rise_external"
    FALL_EXTERNAL = "fall_external"
    INTRINSIC_PLUS = "intrinsic_plus"
    INTRINSIC_MINUS = "intrinsic_minus"
    NONE = "none"

    @property
    def external(self) -> bool:
        return self in (JumpCase.RISE_EXTERNAL, JumpCase.FALL_EXTERNAL)


class JumpError(ValueError):
    pass


class SolverError(RuntimeError):
    """Raised when the trajectory becomes non-finite."""

    def __init__(self, message: str, t: float, k: int):
        self.t, self.k = t, k
        super().__init__(f"{message} at hybrid time (t={t!r}, k={k})")


@dataclass(frozen=True)
class HybridTime:
    t: float
    k: int

    def __post_init__(self):
        if self.t < 0 or self.k < 0:
            raise ValueError("hybrid time needs t >= 0 and k >= 0")


@dataclass(frozen=True)
class JumpConfig:
    """Thresholds and perturbations of the intrinsic jump sets.

    ``kappa`` triggers growth-driven additions (``x_k >= kappa``), ``lam``
    triggers pruning (``0 < x_k <= lam``). ``y_l_provider(state, t)`` returns
    the state added on an intrinsic-plus jump, on labels disjoint from the
    current basis; ``None`` means nothing is added.
    """

    kappa: float = math.inf
    lam: float = 1e-6
    xi_plus: float = 0.0
    xi_minus: float = 0.0
    enable_jplus: bool = False
    enable_jminus: bool = True
    y_l_provider: Callable[[State, float], State | None] | None = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        if not self.lam > 0:
            raise ValueError("lam must be > 0")
        if self.enable_jplus and self.enable_jminus and not self.lam < self.kappa:
            raise ValueError("lam must be below kappa when both intrinsic sets are enabled")


@dataclass(frozen=True)
class ScheduledInput:
    t: float
    state: State
    name: str = ""


@dataclass(frozen=True)
class Disturbance:
    """Continuous control ``u(t)`` plus a schedule of external jump inputs.

    ``breakpoints`` lists the times where ``u`` changes value; the integrator
    never steps across them, so ``u`` is constant over every step.
    """

    u: Callable[[float], float] = lambda t: 0.0
    breakpoints: tuple[float, ...] = ()
    schedule: tuple[ScheduledInput, ...] = ()

    def __post_init__(self):
        times = [s.t for s in self.schedule]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError(f"schedule times must be strictly increasing, got {times}")
        if any(t < 0 for t in times):
            raise ValueError("schedule times must be non-negative")


@dataclass(frozen=True)
class FlowMap:
    """Coupled flow ``x' = f_v(x, w, a, u)``, ``w' = f_e(x, w, a, u)``, ``a' = 0``.

    Both callables are ``f(basis, x, w, a, u)`` on dense arrays and must accept
    any basis. ``f_e=None`` freezes the weights.
    """

    f_v: ArrayRhs
    f_e: ArrayRhs | None = None

    def bind(self, basis: BasisSet):
        """Array-only callables ``f(x, w, a, u)`` for one basis."""
        fe = None if self.f_e is None else partial(self.f_e, basis)
        return partial(self.f_v, basis), fe

    def rhs(self, state: State, u: float) -> tuple[np.ndarray, np.ndarray]:
        fv, fe = self.bind(state.basis)
        dx = fv(state.x, state.w, state.a, u)
        dw = np.zeros_like(state.w) if fe is None else fe(state.x, state.w, state.a, u)
        return dx, dw


def rk4_step(fv, fe, x, w, a, u: float, h: float):
    """One classical fourth-order step; weights are masked to edges afterwards."""
    k1 = fv(x, w, a, u)
    if fe is None:
        k2 = fv(x + 0.5 * h * k1, w, a, u)
        k3 = fv(x + 0.5 * h * k2, w, a, u)
        k4 = fv(x + h * k3, w, a, u)
        return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), w
    m1 = fe(x, w, a, u)
    x2, w2 = x + 0.5 * h * k1, w + 0.5 * h * m1
    k2, m2 = fv(x2, w2, a, u), fe(x2, w2, a, u)
    x3, w3 = x + 0.5 * h * k2, w + 0.5 * h * m2
    k3, m3 = fv(x3, w3, a, u), fe(x3, w3, a, u)
    x4, w4 = x + h * k3, w + h * m3
    k4, m4 = fv(x4, w4, a, u), fe(x4, w4, a, u)
    x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    w_new = w + (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4)
    return x_new, np.where(a, w_new, 0.0)


def _labels_where(x: State, mask: np.ndarray) -> frozenset[int]:
    return frozenset(lab for lab, on in zip(x.basis.labels, mask) if on)


def _minus_labels(x: State, cfg: JumpConfig) -> frozenset[int]:
    return _labels_where(x, (x.x > 0.0) & (x.x <= cfg.lam))


def _plus_labels(x: State, cfg: JumpConfig) -> frozenset[int]:
    return _labels_where(x, x.x >= cfg.kappa)


def classify_jump(
    x: State,
    u_in: State | None,
    cfg: JumpConfig,
    ignore_plus: Iterable[int] = (),
) -> JumpCase:
    """Which jump set ``(x, u_in)`` lies in.

    External inputs take precedence over intrinsic sets, and pruning over
    growth. An input whose basis equals the state's basis is neither a rise
    nor a strict fall; it is treated as a fall that retains everything.
    Labels in ``ignore_plus`` (already handled) do not trigger a growth jump.
    """
    if u_in is not None and u_in.dim > 0:
        b, c = set(x.basis.labels), set(u_in.basis.labels)
        if not c <= b:
            return JumpCase.RISE_EXTERNAL
        if c < b:
            return JumpCase.FALL_EXTERNAL
        log.warning("external input basis equals the state basis; applying as full retention")
        return JumpCase.FALL_EXTERNAL
    if cfg.enable_jminus and _minus_labels(x, cfg):
        return JumpCase.INTRINSIC_MINUS
    if cfg.enable_jplus and _plus_labels(x, cfg) - set(ignore_plus):
        return JumpCase.INTRINSIC_PLUS
    return JumpCase.NONE


def apply_jump(
    x: State,
    u_in: State | None,
    case: JumpCase,
    cfg: JumpConfig,
    t: float = 0.0,
) -> State:
    """Apply the jump map for ``case`` and return the post-jump state."""
    if case is JumpCase.RISE_EXTERNAL:
        return state_combine("union", x, u_in)
    if case is JumpCase.FALL_EXTERNAL:
        return state_combine("inter", x, u_in)
    if case is JumpCase.INTRINSIC_PLUS:
        added = cfg.y_l_provider(x, t) if cfg.y_l_provider else None
        added = empty_state() if added is None else added
        overlap = set(added.basis.labels) & set(x.basis.labels)
        if overlap:
            raise JumpError(f"added state overlaps the current basis on labels {sorted(overlap)}")
        g = state_combine("union", state_scalar_mul(cfg.xi_plus, unit_state(x)), added)
        return state_combine("union", x, g)
    if case is JumpCase.INTRINSIC_MINUS:
        dropped = _minus_labels(x, cfg)
        keep = [lab for lab in x.basis.labels if lab not in dropped]
        h = state_scalar_mul(cfg.xi_minus, unit_state(x, keep))
        return state_combine("inter", x, h)
    raise JumpError("no jump to apply for case NONE")


@dataclass
class Segment:
    """Flow of the arc between two jumps: samples on a constant basis."""

    k: int
    basis: BasisSet
    a: np.ndarray
    t: np.ndarray
    x: np.ndarray
    w: np.ndarray
    allow_loops: bool = True

    def __len__(self) -> int:
        return len(self.t)

    def state(self, i: int) -> State:
        return State(self.basis, self.x[i], self.w[i], self.a, self.allow_loops)

    @property
    def start(self) -> float:
        return float(self.t[0])

    @property
    def end(self) -> float:
        return float(self.t[-1])


@dataclass(frozen=True)
class JumpEvent:
    tau: float
    k: int
    case: JumpCase
    pre: State
    post: State
    u_in: State | None = None


@dataclass
class HybridArc:
    segments: list[Segment] = field(default_factory=list)
    jumps: list[JumpEvent] = field(default_factory=list)
    truncated: bool = False

    @property
    def taus(self) -> list[float]:
        return [0.0] + [j.tau for j in self.jumps]

    @property
    def n_samples(self) -> int:
        return sum(len(s) for s in self.segments)

    @property
    def final_state(self) -> State:
        seg = self.segments[-1]
        return seg.state(len(seg) - 1)

    def samples(self):
        """Yield ``(t, k, State)`` for every recorded sample."""
        for seg in self.segments:
            for i in range(len(seg)):
                yield float(seg.t[i]), seg.k, seg.state(i)

    def dimension_trace(self) -> list[tuple[float, int, int]]:
        return [(float(t), seg.k, len(seg.basis)) for seg in self.segments for t in seg.t]

    def segment_dims(self) -> list[int]:
        return [len(s.basis) for s in self.segments]


def check_arc(arc: HybridArc) -> list[str]:
    """Solution-pair conditions at sample resolution; returns violations."""
    problems = []
    for i, seg in enumerate(arc.segments):
        if seg.k != i:
            problems.append(f"segment {i} carries jump index {seg.k}")
        if np.any(np.diff(seg.t) < 0):
            problems.append(f"segment {i} has decreasing sample times")
        if seg.x.shape[1:] != (len(seg.basis),) or seg.w.shape[1:] != (len(seg.basis),) * 2:
            problems.append(f"segment {i} changes basis during flow")
    for j in arc.jumps:
        before, after = arc.segments[j.k - 1], arc.segments[j.k]
        if before.end != j.tau or after.start != j.tau:
            problems.append(f"jump {j.k} at {j.tau} does not join its segments")
        if before.state(len(before) - 1) != j.pre or after.state(0) != j.post:
            problems.append(f"jump {j.k} endpoints differ from recorded segment states")
        if validate_state(j.post):
            problems.append(f"jump {j.k} leaves the graph image")
    taus = arc.taus
    if any(b < a for a, b in zip(taus, taus[1:])):
        problems.append("jump times decrease")
    return problems


class _SegmentBuilder:
    def __init__(self, k: int, state: State):
        self.k = k
        self.basis = state.basis
        self.a = state.a
        self.allow_loops = state.allow_loops
        self.t: list[float] = []
        self.x: list[np.ndarray] = []
        self.w: list[np.ndarray] = []

    def record(self, t: float, x: np.ndarray, w: np.ndarray) -> None:
        if self.t and self.t[-1] == t:
            self.x[-1], self.w[-1] = x, w
            return
        self.t.append(t)
        self.x.append(x)
        self.w.append(w)

    def build(self) -> Segment:
        n = len(self.basis)
        return Segment(
            self.k,
            self.basis,
            self.a,
            np.array(self.t, dtype=float),
            np.array(self.x, dtype=float).reshape(len(self.t), n),
            np.array(self.w, dtype=float).reshape(len(self.t), n, n),
            self.allow_loops,
        )


def solve(
    flow: FlowMap,
    x0: State,
    dist: Disturbance,
    cfg: JumpConfig,
    t_max: float,
    k_max: int = 1000,
    dt: float = 0.01,
    record_every: int = 1,
) -> HybridArc:
    """Build a hybrid arc from ``x0`` on ``[0, t_max]``.

    Between events the state flows with fixed step ``dt`` (the last step before
    an event or a control breakpoint is shortened to land on it). Intrinsic
    sets are tested after every step. At one instant a due external input is
    applied first, then intrinsic jumps, each incrementing ``k``. Every
    ``record_every``-th step is stored, plus the end point of every flow
    interval.

    :raises SolverError: when the state becomes non-finite
    """
    if not dt > 0 or not t_max > 0:
        raise ValueError("dt and t_max must be positive")
    problems = validate_state(x0)
    if problems:
        raise StateError("initial state is not canonical: " + "; ".join(problems))
    tol = 1e-9 * dt
    schedule: Sequence[ScheduledInput] = dist.schedule
    breaks = sorted({b for b in dist.breakpoints if 0.0 < b < t_max})

    arc = HybridArc()
    t, k, state = 0.0, 0, x0
    si = 0
    handled_plus = frozenset()
    seg = _SegmentBuilder(k, state)
    seg.record(t, state.x, state.w)

    while True:
        u_in = None
        if si < len(schedule) and schedule[si].t <= t + tol:
            u_in = schedule[si].state
        case = classify_jump(state, u_in, cfg, ignore_plus=handled_plus)
        if u_in is not None and not case.external:
            si += 1  # empty input: nothing to apply
            u_in = None
        if case is not JumpCase.NONE:
            if case.external:
                si += 1
            else:
                u_in = None
            if k >= k_max:
                arc.truncated = True
                log.warning("jump budget k_max=%d exhausted at t=%g", k_max, t)
                break
            post = apply_jump(state, u_in, case, cfg, t)
            arc.segments.append(seg.build())
            k += 1
            arc.jumps.append(JumpEvent(t, k, case, state, post, u_in))
            log.debug("jump %d at t=%g: %s, dim %d -> %d", k, t, case.value, state.dim, post.dim)
            if case is JumpCase.INTRINSIC_PLUS:
                handled_plus = _plus_labels(post, cfg)
            state = post
            seg = _SegmentBuilder(k, state)
            seg.record(t, state.x, state.w)
            continue
        if t >= t_max - tol:
            break

        stop = t_max
        if si < len(schedule):
            stop = min(stop, schedule[si].t)
        for b in breaks:
            if b > t + tol:
                stop = min(stop, b)
                break

        anchor, n = t, 0
        x, w, a = state.x, state.w, state.a
        fv, fe = flow.bind(state.basis)
        idx_labels = state.basis.labels
        # non-finite values are caught below and reported as SolverError
        with np.errstate(over="ignore", invalid="ignore"):
            while t < stop - tol:
                n += 1
                t_next = anchor + n * dt
                if t_next > stop - tol:
                    t_next = stop
                h = t_next - t
                u = float(dist.u(t + 0.5 * h))
                x, w = rk4_step(fv, fe, x, w, a, u, h)
                t = t_next
                if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
                    raise SolverError("non-finite state", t, k)
                hit = False
                if cfg.enable_jminus and np.any((x > 0.0) & (x <= cfg.lam)):
                    hit = True
                if cfg.enable_jplus:
                    above = frozenset(lab for lab, v in zip(idx_labels, x) if v >= cfg.kappa)
                    handled_plus = handled_plus & above
                    if above - handled_plus:
                        hit = True
                if hit or n % record_every == 0 or t >= stop - tol:
                    seg.record(t, x, w)
                if hit:
                    break
        state = state.with_values(x, w)

    arc.segments.append(seg.build())
    return arc


__all__ = [
    "Disturbance",
    "FlowMap",
    "HybridArc",
    "HybridTime",
    "JumpCase",
    "JumpConfig",
    "JumpError",
    "JumpEvent",
    "ScheduledInput",
    "Segment",
    "SolverError",
    "apply_jump",
    "check_arc",
    "classify_jump",
    "rk4_step",
    "solve",
]
