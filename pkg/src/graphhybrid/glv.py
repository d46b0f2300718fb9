"""Gut-microbiota model: gLV abundances, Oja-style weights, antibiotic control.

Abundances follow ``x' = x * (rho + (a*w) @ x + u * eps)``; interaction
weights follow ``w' = alpha * w * a + beta * x x^T``. The model data of the
application (initial community, bacteriotherapy inputs) live here as well.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .hybrid import FlowMap, ScheduledInput
from .variable_basis import BasisSet, BoolTensor, State, VBTensor, VBVector

UNIVERSE = BasisSet(tuple(range(1, 12)))

ALPHA = -2e-2
BETA = -1e-1
T_STAR = 4.0
LAMBDA = 1e-6


class ParamError(ValueError):
    pass


@dataclass(frozen=True)
class GLVParams:
    """Per-species rates plus the scalar weight-dynamics coefficients.

    :param growth: growth rate per label (1/day)
    :param susceptibility: antibiotic susceptibility per label (1/day)
    :param self_interaction: loop weight for species added by built-in inputs
    """

    growth: Mapping[int, float]
    susceptibility: Mapping[int, float]
    alpha: float = ALPHA
    beta: float = BETA
    t_star: float = T_STAR
    self_interaction: Mapping[int, float] = field(default_factory=dict)

    def _on(self, table: Mapping[int, float], basis: BasisSet, what: str) -> np.ndarray:
        missing = [i for i in basis.labels if i not in table]
        if missing:
            raise ParamError(f"no {what} for species {missing}")
        return np.array([table[i] for i in basis.labels], dtype=float)

    def growth_on(self, basis: BasisSet) -> np.ndarray:
        return self._on(self.growth, basis, "growth rate")

    def susceptibility_on(self, basis: BasisSet) -> np.ndarray:
        return self._on(self.susceptibility, basis, "susceptibility")


def _attribute_rate(x, w, a, u, rho, eps):
    return x * (rho + (w * a) @ x + u * eps)


def _weight_rate(x, w, a, alpha, beta):
    return alpha * w * a + beta * np.outer(x, x)


def glv_attribute_rhs(x: VBVector, w: VBTensor, a: BoolTensor, u: float, p: GLVParams) -> VBVector:
    """Abundance derivative on ``x``'s basis."""
    basis = x.basis
    n = len(basis)
    _check_square(basis, w.basis.pairs, a.basis.pairs)
    dx = _attribute_rate(
        np.asarray(x.coeffs),
        np.asarray(w.coeffs).reshape(n, n),
        np.asarray(a.coeffs).reshape(n, n),
        u,
        p.growth_on(basis),
        p.susceptibility_on(basis),
    )
    return VBVector(basis, dx)


def weight_rhs(x: VBVector, w: VBTensor, a: BoolTensor, p: GLVParams) -> VBTensor:
    """Weight derivative on the full square, before masking to existing edges."""
    n = len(x.basis)
    _check_square(x.basis, w.basis.pairs, a.basis.pairs)
    dw = _weight_rate(
        np.asarray(x.coeffs), np.asarray(w.coeffs).reshape(n, n), np.asarray(a.coeffs).reshape(n, n),
        p.alpha, p.beta,
    )
    return VBTensor(w.basis, dw.reshape(-1))


def _check_square(basis: BasisSet, *pair_lists) -> None:
    expected = basis.square().pairs
    for pairs in pair_lists:
        if tuple(pairs) != expected:
            raise ValueError("weight/adjacency tensors must live on the square of the attribute basis")


def glv_flow(params: GLVParams, freeze_weights: bool = False) -> FlowMap:
    """Flow map of the application; ``freeze_weights`` drops the weight dynamics."""
    cache: dict[BasisSet, tuple[np.ndarray, np.ndarray]] = {}

    def f_v(basis, x, w, a, u):
        if basis not in cache:
            cache[basis] = (params.growth_on(basis), params.susceptibility_on(basis))
        rho, eps = cache[basis]
        return _attribute_rate(x, w, a, u, rho, eps)

    def f_e(basis, x, w, a, u):
        return _weight_rate(x, w, a, params.alpha, params.beta)

    return FlowMap(f_v, None if freeze_weights else f_e)


def antibiotic_u(t: float, t_star: float = T_STAR) -> float:
    """1 while the antibiotic is given (``0 <= t < t_star``), 0 afterwards."""
    return 1.0 if t < t_star else 0.0


INITIAL_LABELS = (1, 2, 4, 5)
INITIAL_ABUNDANCE = (0.7, 0.3, 1.2, 1.3)
# rows: affected species, columns: acting species, in INITIAL_LABELS order
INITIAL_WEIGHTS = (
    (-0.21, 0.1, -0.16, -0.014),
    (0.06, -0.1, -0.15, -0.19),
    (0.22, 0.14, -0.83, -0.22),
    (-0.18, 0.0, -0.05, -0.51),
)


def build_initial_state() -> State:
    """Four-species community on {1, 2, 4, 5}, every ordered pair (loops included) an edge."""
    n = len(INITIAL_LABELS)
    return State(
        BasisSet(INITIAL_LABELS),
        np.array(INITIAL_ABUNDANCE),
        np.array(INITIAL_WEIGHTS),
        np.ones((n, n), dtype=bool),
    )


# newcomer -> {resident: interaction} for the two transplant inputs
_FMT_190 = {9: {1: 0.35, 2: -0.03, 4: 0.67, 5: 0.16}}
_FMT_190_ATTR = {9: 0.85}
_FMT_330 = {
    3: {1: 0.14, 2: -0.04, 4: -0.13, 5: -0.17, 9: 0.30, 8: -0.77},
    8: {1: -0.4, 2: -0.41, 4: -1.01, 5: 0.55, 9: 0.44},
}
_FMT_330_ATTR = {3: 0.6, 8: 0.8}
RETAINED_560 = (1, 2, 4)


def _transplant(
    residents: Iterable[int],
    newcomers: Mapping[int, float],
    links: Mapping[int, Mapping[int, float]],
    self_interaction: Mapping[int, float],
    directions: str,
) -> State:
    x = {i: 0.0 for i in residents}
    x.update(newcomers)
    w: dict[tuple[int, int], float] = {}
    for new, targets in links.items():
        for other, val in targets.items():
            if directions in ("both", "into_new"):
                w[(new, other)] = val
            if directions in ("both", "from_new"):
                w[(other, new)] = val
    for new in newcomers:
        if new in self_interaction:
            w[(new, new)] = float(self_interaction[new])
    return State.from_dicts(x, w)


def bacteriotherapy_schedule(
    self_interaction: Mapping[int, float] | None = None,
    directions: str = "both",
) -> list[ScheduledInput]:
    """The three built-in inputs: transplants at t=190 and t=330, retention at t=560.

    Zero values on resident species mean "no perturbation". Each drawn
    interaction is applied to both directions unless ``directions`` is
    ``"into_new"`` (only ``w[new, other]``) or ``"from_new"`` (only
    ``w[other, new]``). Species present in ``self_interaction`` get a loop
    with that weight when added. The retention input is the complete zero
    graph with loops on {1, 2, 4}.
    """
    if directions not in ("both", "into_new", "from_new"):
        raise ValueError(f"unknown directions {directions!r}")
    si = dict(self_interaction or {})
    first = _transplant((1, 2, 4, 5), _FMT_190_ATTR, _FMT_190, si, directions)
    second = _transplant((1, 2, 4, 5, 9), _FMT_330_ATTR, _FMT_330, si, directions)
    n = len(RETAINED_560)
    retain = State(BasisSet(RETAINED_560), np.zeros(n), np.zeros((n, n)), np.ones((n, n), bool))
    return [
        ScheduledInput(190.0, first, "add species 9"),
        ScheduledInput(330.0, second, "add species 3 and 8"),
        ScheduledInput(560.0, retain, "retain species 1, 2, 4"),
    ]


def _parse_params(text: str, source: str, universe: BasisSet) -> GLVParams:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    fields = [f.strip() for f in reader.fieldnames or []]
    for col in ("species_id", "growth_rate", "susceptibility"):
        if col not in fields:
            raise ParamError(f"{source}: missing column {col!r}")
    growth, eps, selfi = {}, {}, {}
    for lineno, row in enumerate(reader, start=2):
        row = {k.strip(): (v or "").strip() for k, v in row.items() if k}
        try:
            sid = int(row["species_id"])
            growth[sid] = float(row["growth_rate"])
            eps[sid] = float(row["susceptibility"])
            if row.get("self_interaction"):
                selfi[sid] = float(row["self_interaction"])
        except ValueError as exc:
            raise ParamError(f"{source}: row {lineno}: non-numeric field ({exc})") from None
    missing = [i for i in universe.labels if i not in growth]
    if missing:
        raise ParamError(f"{source}: no row for species {', '.join(map(str, missing))}")
    return GLVParams(growth, eps, self_interaction=selfi)


def load_params(
    path: str | Path | None = None,
    universe: BasisSet = UNIVERSE,
    **overrides,
) -> GLVParams:
    """Read ``species_id, growth_rate, susceptibility[, self_interaction]`` rows.

    ``path=None`` loads the bundled file. Lines starting with ``#`` are
    comments. Keyword overrides (``alpha``, ``beta``, ``t_star``) replace the
    defaults.

    :raises ParamError: on a missing species row or a non-numeric field
    """
    if path is None:
        text = resources.files("graphhybrid.data").joinpath("stein_params.csv").read_text("utf-8")
        source = "bundled stein_params.csv"
    else:
        text = Path(path).read_text(encoding="utf-8")
        source = str(path)
    p = _parse_params(text, source, universe)
    if overrides:
        p = GLVParams(
            p.growth,
            p.susceptibility,
            overrides.get("alpha", p.alpha),
            overrides.get("beta", p.beta),
            overrides.get("t_star", p.t_star),
            p.self_interaction,
        )
    return p
