"""Variable-basis vectors, tensors and the product state ``(x, w, a)``.

Every element carries its own basis: a vector lives on a finite label set,
a tensor on a set of label pairs. Addition is defined across different bases
by combining the bases (union or intersection) and zero-filling missing
coordinates.

A :class:`State` is the graph image: attributes ``x`` on a basis ``B``,
weights ``w`` and adjacency ``a`` on the full square ``B x B``, stored densely.
States are kept canonical, i.e. ``w[p, q] == 0`` wherever ``a[p, q]`` is false.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Mapping

import numpy as np

Star = Literal["union", "inter"]
Pair = tuple[int, int]


def _check_star(star: str) -> None:
    if star not in ("union", "inter"):
        raise ValueError(f"unknown combination {star!r}; expected 'union' or 'inter'")


@dataclass(frozen=True)
class BasisSet:
    """Finite label set in canonical ascending order."""

    labels: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(sorted({int(i) for i in self.labels})))

    @classmethod
    def of(cls, labels: Iterable[int]) -> "BasisSet":
        return cls(tuple(labels))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def union(self, other: "BasisSet") -> "BasisSet":
        return BasisSet(self.labels + other.labels)

    def inter(self, other: "BasisSet") -> "BasisSet":
        return BasisSet(tuple(set(self.labels) & set(other.labels)))

    def combine(self, star: Star, other: "BasisSet") -> "BasisSet":
        _check_star(star)
        return self.union(other) if star == "union" else self.inter(other)

    def issubset(self, other: "BasisSet") -> bool:
        return set(self.labels) <= set(other.labels)

    def index(self) -> dict[int, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def square(self) -> "PairBasis":
        return PairBasis(tuple((p, q) for p in self.labels for q in self.labels))


@dataclass(frozen=True)
class PairBasis:
    """Finite set of label pairs in lexicographic order."""

    pairs: tuple[Pair, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "pairs", tuple(sorted({(int(p), int(q)) for p, q in self.pairs}))
        )

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def combine(self, star: Star, other: "PairBasis") -> "PairBasis":
        _check_star(star)
        mine, theirs = set(self.pairs), set(other.pairs)
        return PairBasis(tuple(mine | theirs if star == "union" else mine & theirs))


@dataclass(frozen=True, eq=False)
class _Coords:
    basis: object
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=self._dtype, copy=True).reshape(-1)
        if c.shape[0] != len(self.basis):
            raise ValueError(
                f"{type(self).__name__}: {c.shape[0]} coefficients for a basis of size {len(self.basis)}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    _dtype = float

    def _keys(self):
        return getattr(self.basis, "labels", None) or getattr(self.basis, "pairs", ())

    def as_dict(self) -> dict:
        return dict(zip(self._keys(), self.coeffs.tolist()))

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.basis == other.basis and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.basis, self.coeffs.tobytes()))


class VBVector(_Coords):
    """Real coordinates on a :class:`BasisSet`."""

    basis: BasisSet

    @classmethod
    def from_dict(cls, d: Mapping[int, float]) -> "VBVector":
        b = BasisSet(tuple(d))
        return cls(b, [d[i] for i in b.labels])


class VBTensor(_Coords):
    """Real coordinates on a :class:`PairBasis`."""

    basis: PairBasis

    @classmethod
    def from_dict(cls, d: Mapping[Pair, float]) -> "VBTensor":
        b = PairBasis(tuple(d))
        return cls(b, [d[e] for e in b.pairs])


class BoolTensor(_Coords):
    """Boolean coordinates on a :class:`PairBasis`."""

    basis: PairBasis
    _dtype = bool

    @classmethod
    def from_dict(cls, d: Mapping[Pair, bool]) -> "BoolTensor":
        b = PairBasis(tuple(d))
        return cls(b, [bool(d[e]) for e in b.pairs])


def _merge(keys, a: dict, b: dict, op):
    return [op(a.get(k, 0), b.get(k, 0)) for k in keys]


def vec_combine(star: Star, x: VBVector, y: VBVector) -> VBVector:
    """``x +union y`` or ``x +inter y``: sum of the projections on the combined basis."""
    basis = x.basis.combine(star, y.basis)
    return VBVector(basis, _merge(basis.labels, x.as_dict(), y.as_dict(), lambda p, q: p + q))


def tensor_combine(star: Star, w: VBTensor, v: VBTensor) -> VBTensor:
    basis = w.basis.combine(star, v.basis)
    return VBTensor(basis, _merge(basis.pairs, w.as_dict(), v.as_dict(), lambda p, q: p + q))


def bool_combine(star: Star, a: BoolTensor, e: BoolTensor) -> BoolTensor:
    """Disjunction on the union of pair bases, conjunction on their intersection."""
    basis = a.basis.combine(star, e.basis)
    op = (lambda p, q: p or q) if star == "union" else (lambda p, q: p and q)
    return BoolTensor(basis, _merge(basis.pairs, a.as_dict(), e.as_dict(), op))


class StateError(ValueError):
    """A state is outside the graph image (non-canonical or malformed)."""


@dataclass(frozen=True, eq=False)
class State:
    """Element ``(x_B, w_D, a_D)`` with ``D = B x B``, stored as dense arrays.

    ``w`` and ``a`` are indexed ``[row, col]`` in basis order; ``w[p, q]`` is
    the weight of the edge ``(p, q)``. Arrays are read-only.
    """

    basis: BasisSet
    x: np.ndarray
    w: np.ndarray
    a: np.ndarray
    allow_loops: bool = True

    def __post_init__(self):
        n = len(self.basis)
        x = np.array(self.x, dtype=float, copy=True).reshape(n)
        w = np.array(self.w, dtype=float, copy=True).reshape(n, n)
        a = np.array(self.a, dtype=bool, copy=True).reshape(n, n)
        for arr in (x, w, a):
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "a", a)

    @classmethod
    def from_dicts(
        cls,
        x: Mapping[int, float],
        w: Mapping[Pair, float] | None = None,
        a: Iterable[Pair] | Mapping[Pair, bool] | None = None,
        allow_loops: bool = True,
    ) -> "State":
        """Build a state from sparse dictionaries; missing entries are zero/false.

        If ``a`` is omitted, every pair listed in ``w`` is an edge.
        """
        basis = BasisSet(tuple(x))
        idx = basis.index()
        n = len(basis)
        xv = np.array([x[i] for i in basis.labels], dtype=float)
        wm = np.zeros((n, n))
        am = np.zeros((n, n), dtype=bool)
        for (p, q), val in (w or {}).items():
            wm[idx[p], idx[q]] = val
        if a is None:
            a = list((w or {}).keys())
        if isinstance(a, Mapping):
            a = [e for e, on in a.items() if on]
        for p, q in a:
            am[idx[p], idx[q]] = True
        return cls(basis, xv, wm, am, allow_loops)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pair_basis(self) -> PairBasis:
        return self.basis.square()

    @property
    def vector(self) -> VBVector:
        return VBVector(self.basis, self.x)

    @property
    def weights(self) -> VBTensor:
        return VBTensor(self.pair_basis, self.w.reshape(-1))

    @property
    def adjacency(self) -> BoolTensor:
        return BoolTensor(self.pair_basis, self.a.reshape(-1))

    def attr(self, label: int) -> float:
        return float(self.x[self.basis.index()[label]])

    def weight(self, p: int, q: int) -> float:
        idx = self.basis.index()
        return float(self.w[idx[p], idx[q]])

    def edge(self, p: int, q: int) -> bool:
        idx = self.basis.index()
        return bool(self.a[idx[p], idx[q]])

    def with_values(self, x: np.ndarray | None = None, w: np.ndarray | None = None) -> "State":
        """Same basis and adjacency, new attribute and/or weight arrays."""
        return State(
            self.basis,
            self.x if x is None else x,
            self.w if w is None else w,
            self.a,
            self.allow_loops,
        )

    def restrict(self, labels: Iterable[int]) -> "State":
        keep = BasisSet(tuple(labels))
        idx = self.basis.index()
        sel = [idx[i] for i in keep.labels]
        return State(keep, self.x[sel], self.w[np.ix_(sel, sel)], self.a[np.ix_(sel, sel)], self.allow_loops)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return (
            self.basis == other.basis
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.w, other.w)
            and np.array_equal(self.a, other.a)
        )

    def __hash__(self):
        return hash((self.basis, self.x.tobytes(), self.w.tobytes(), self.a.tobytes()))

    def isclose(self, other: "State", tol: float = 1e-12) -> bool:
        return (
            self.basis == other.basis
            and np.array_equal(self.a, other.a)
            and bool(np.all(np.abs(self.x - other.x) <= tol))
            and bool(np.all(np.abs(self.w - other.w) <= tol))
        )

    def __repr__(self) -> str:
        return f"State(basis={self.basis.labels}, x={self.x.tolist()}, edges={int(self.a.sum())})"


def empty_state() -> State:
    return State(BasisSet(), np.zeros(0), np.zeros((0, 0)), np.zeros((0, 0), bool))


def complete_zero_state(universe: Iterable[int], allow_loops: bool = True) -> State:
    """Total, complete, zero state: the identity of ``+inter`` over ``universe``."""
    basis = BasisSet(tuple(universe))
    n = len(basis)
    a = np.ones((n, n), dtype=bool)
    if not allow_loops:
        np.fill_diagonal(a, False)
    return State(basis, np.zeros(n), np.zeros((n, n)), a, allow_loops)


def unit_state(x: State, labels: Iterable[int] | None = None) -> State:
    """Unit element built from ``x``: attributes 1, weights 1 on ``x``'s edges.

    With ``labels``, the unit is restricted to that subset of ``x``'s basis.
    """
    base = x if labels is None else x.restrict(labels)
    return base.with_values(np.ones(base.dim), base.a.astype(float))


def canonicalize(x: State) -> State:
    """Zero the weights of absent edges (and of loops when loops are disallowed)."""
    a = x.a
    if not x.allow_loops and x.dim:
        a = a.copy()
        np.fill_diagonal(a, False)
    w = np.where(a, x.w, 0.0)
    return State(x.basis, x.x, w, a, x.allow_loops)


def _expand(basis: BasisSet, t: VBTensor | BoolTensor, dtype) -> np.ndarray:
    idx = basis.index()
    out = np.zeros((len(basis), len(basis)), dtype=dtype)
    for (p, q), c in zip(t.basis.pairs, t.coeffs):
        out[idx[p], idx[q]] = c
    return out


def state_combine(star: Star, x: State, y: State) -> State:
    """``x +union y`` / ``x +inter y`` on states.

    Attributes, weights and adjacency are combined componentwise, the pair
    tensors are zero-filled onto the full square of the new basis, and the
    result is canonicalized.
    """
    _check_star(star)
    vec = vec_combine(star, x.vector, y.vector)
    wt = tensor_combine(star, x.weights, y.weights)
    adj = bool_combine(star, x.adjacency, y.adjacency)
    basis = vec.basis
    loops = (x.allow_loops or y.allow_loops) if star == "union" else (x.allow_loops and y.allow_loops)
    out = State(basis, vec.coeffs, _expand(basis, wt, float), _expand(basis, adj, bool), loops)
    return canonicalize(out)


def state_scalar_mul(lam: float, x: State) -> State:
    """Scale attributes and weights; the basis and adjacency stay as they are."""
    return x.with_values(lam * x.x, lam * x.w)


def validate_state(x: State) -> list[str]:
    """List the reasons ``x`` is not in the graph image; empty if it is."""
    problems = []
    labels = x.basis.labels
    if list(labels) != sorted(set(labels)):
        problems.append("basis labels not unique and ascending")
    if any(i < 0 for i in labels):
        problems.append("negative label in basis")
    n = len(labels)
    if x.x.shape != (n,):
        problems.append(f"attribute vector has shape {x.x.shape}, expected ({n},)")
    if x.w.shape != (n, n) or x.a.shape != (n, n):
        problems.append("weight/adjacency tensors are not on the full square of the basis")
        return problems
    if not (np.all(np.isfinite(x.x)) and np.all(np.isfinite(x.w))):
        problems.append("non-finite attribute or weight")
    bad = np.argwhere(~x.a & (x.w != 0.0))
    for i, j in bad:
        problems.append(f"weight {x.w[i, j]!r} on absent edge ({labels[i]}, {labels[j]})")
    if not x.allow_loops:
        for i in range(n):
            if x.a[i, i] or x.w[i, i] != 0.0:
                problems.append(f"loop ({labels[i]}, {labels[i]}) present but loops are disallowed")
    return problems


@dataclass(frozen=True)
class StateKind:
    total: bool
    complete: bool
    null: bool
    has_loops: bool


def classify_state(x: State, universe: BasisSet | Iterable[int]) -> StateKind:
    """Total / complete / null / loop flags of a state relative to ``universe``.

    ``complete`` requires every off-diagonal pair; loops are reported separately.
    """
    uni = universe if isinstance(universe, BasisSet) else BasisSet(tuple(universe))
    off = ~np.eye(x.dim, dtype=bool)
    return StateKind(
        total=x.basis == uni,
        complete=bool(np.all(x.a[off])),
        null=bool(np.all(x.x == 0.0) and np.all(x.w == 0.0)),
        has_loops=bool(np.any(np.diag(x.a))),
    )
