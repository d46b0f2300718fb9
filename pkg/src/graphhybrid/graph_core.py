"""Labeled, weighted, attributed graphs and their additive algebra.

A graph is a finite set of labeled vertices carrying real attributes plus a
set of directed, labeled edges carrying real weights. Two binary laws act on
graphs:

* ``union_add`` merges topologies and sums values on the shared part;
* ``inter_add`` keeps only the shared topology and sums values on it.

Edge presence is set membership. A zero weight is still an edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Mapping

Label = int
Pair = tuple[int, int]


class GraphError(ValueError):
    """Raised when a graph literal or graph value breaks a structural invariant."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def _freeze(mapping: Mapping) -> Mapping:
    return MappingProxyType(dict(sorted(mapping.items())))


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable attributed graph.

    :param vertices: mapping ``label -> attribute``
    :param edges: mapping ``(p, q) -> weight``; ``(p, q)`` and ``(q, p)`` are distinct
    :param allow_loops: whether ``(p, p)`` edges are admissible
    """

    vertices: Mapping[Label, float] = field(default_factory=dict)
    edges: Mapping[Pair, float] = field(default_factory=dict)
    allow_loops: bool = True

    def __post_init__(self):
        verts = {int(k): float(v) for k, v in dict(self.vertices).items()}
        edges = {(int(p), int(q)): float(w) for (p, q), w in dict(self.edges).items()}
        object.__setattr__(self, "vertices", _freeze(verts))
        object.__setattr__(self, "edges", _freeze(edges))

    @property
    def labels(self) -> frozenset[Label]:
        return frozenset(self.vertices)

    @property
    def pairs(self) -> frozenset[Pair]:
        return frozenset(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return dict(self.vertices) == dict(other.vertices) and dict(self.edges) == dict(
            other.edges
        )

    def __hash__(self) -> int:
        return hash((tuple(self.vertices.items()), tuple(self.edges.items())))

    def __repr__(self) -> str:
        return f"Graph(vertices={dict(self.vertices)}, edges={dict(self.edges)})"

    def __len__(self) -> int:
        return len(self.vertices)

    def isclose(self, other: "Graph", tol: float = 1e-12) -> bool:
        """Same topology and all values within ``tol``."""
        if self.labels != other.labels or self.pairs != other.pairs:
            return False
        return all(abs(self.vertices[i] - other.vertices[i]) <= tol for i in self.vertices) and all(
            abs(self.edges[e] - other.edges[e]) <= tol for e in self.edges
        )

    def to_literal(self) -> dict[str, Any]:
        return {
            "vertices": [{"id": i, "attr": x} for i, x in self.vertices.items()],
            "edges": [{"from": p, "to": q, "weight": w} for (p, q), w in self.edges.items()],
        }


EMPTY = Graph()


def _sum_on(keys, a: Mapping, b: Mapping) -> dict:
    return {k: a.get(k, 0.0) + b.get(k, 0.0) for k in keys}


def union_add(x: Graph, y: Graph) -> Graph:
    """Additive union: union of topologies, values summed where both graphs overlap."""
    labels = sorted(x.labels | y.labels)
    pairs = sorted(x.pairs | y.pairs)
    return Graph(
        _sum_on(labels, x.vertices, y.vertices),
        _sum_on(pairs, x.edges, y.edges),
        allow_loops=x.allow_loops or y.allow_loops,
    )


def inter_add(x: Graph, y: Graph) -> Graph:
    """Additive intersection: common topology only, values summed on it."""
    labels = sorted(x.labels & y.labels)
    pairs = sorted(x.pairs & y.pairs)
    return Graph(
        _sum_on(labels, x.vertices, y.vertices),
        _sum_on(pairs, x.edges, y.edges),
        allow_loops=x.allow_loops and y.allow_loops,
    )


def scalar_mul(alpha: float, g: Graph) -> Graph:
    """Scale every attribute and weight by ``alpha``; topology is untouched."""
    return Graph(
        {i: alpha * v for i, v in g.vertices.items()},
        {e: alpha * w for e, w in g.edges.items()},
        allow_loops=g.allow_loops,
    )


def graph_diff(x: Graph, y: Graph, drop_dangling: bool = True) -> Graph:
    """Vertices and edges of ``x`` whose labels are absent from ``y``.

    By default, edges that would lose an endpoint are dropped so the result is
    a valid graph. ``drop_dangling=False`` gives the raw set difference, which
    may hold dangling edges; :func:`decompose` needs it.
    """
    labels = x.labels - y.labels
    verts = {i: v for i, v in x.vertices.items() if i in labels}
    edges = {
        (p, q): w
        for (p, q), w in x.edges.items()
        if (p, q) not in y.edges and (not drop_dangling or (p in labels and q in labels))
    }
    return Graph(verts, edges, allow_loops=x.allow_loops)


def decompose(x: Graph, y: Graph) -> tuple[Graph, Graph, Graph]:
    """Split ``union_add(x, y)`` into its shared part and the two exclusive parts.

    The parts are pairwise disjoint and their :func:`disjoint_union` equals
    ``union_add(x, y)``.
    """
    common = inter_add(x, y)
    return (
        common,
        graph_diff(x, common, drop_dangling=False),
        graph_diff(y, inter_add(y, x), drop_dangling=False),
    )


def disjoint_union(*parts: Graph) -> Graph:
    """Plain union of pairwise label-disjoint graphs.

    :raises GraphError: if two parts share a vertex label or an edge pair
    """
    verts: dict[Label, float] = {}
    edges: dict[Pair, float] = {}
    clashes = []
    for g in parts:
        for i, v in g.vertices.items():
            if i in verts:
                clashes.append(f"vertex {i} appears in more than one part")
            verts[i] = v
        for e, w in g.edges.items():
            if e in edges:
                clashes.append(f"edge {e} appears in more than one part")
            edges[e] = w
    if clashes:
        raise GraphError(clashes)
    return Graph(verts, edges, allow_loops=any(g.allow_loops for g in parts))


def identity_inter(universe: Iterable[Label], allow_loops: bool = False) -> Graph:
    """Total, complete, zero graph over ``universe``: the identity of ``inter_add``."""
    labels = sorted(set(universe))
    edges = {(p, q): 0.0 for p in labels for q in labels if allow_loops or p != q}
    return Graph({i: 0.0 for i in labels}, edges, allow_loops=allow_loops)


@dataclass(frozen=True)
class GraphKind:
    is_empty: bool
    is_zero: bool
    is_total: bool
    is_complete: bool
    has_loops: bool


def classify(g: Graph, universe: Iterable[Label] = ()) -> GraphKind:
    labels = g.labels
    off_diagonal = {(p, q) for p in labels for q in labels if p != q}
    return GraphKind(
        is_empty=not labels and not g.edges,
        is_zero=all(v == 0.0 for v in g.vertices.values()) and all(w == 0.0 for w in g.edges.values()),
        is_total=labels == frozenset(universe),
        is_complete=off_diagonal <= g.pairs,
        has_loops=any(p == q for p, q in g.pairs),
    )


def validate(g: Graph | Mapping[str, Any]) -> list[str]:
    """Return every invariant violation of a graph or graph literal (empty list means valid).

    Literals are checked before construction so duplicate labels and duplicate
    edge pairs can be reported; a built ``Graph`` cannot hold duplicates.
    """
    if isinstance(g, Graph):
        labels = list(g.vertices)
        pairs = list(g.edges)
        allow_loops = g.allow_loops
    else:
        try:
            labels = [int(v["id"]) for v in g.get("vertices", [])]
            pairs = [(int(e["from"]), int(e["to"])) for e in g.get("edges", [])]
        except (KeyError, TypeError, ValueError) as exc:
            return [f"malformed graph literal: {exc!r}"]
        allow_loops = bool(g.get("allow_loops", True))

    problems = []
    seen: set[int] = set()
    for i in labels:
        if i < 0:
            problems.append(f"negative label {i}")
        if i in seen:
            problems.append(f"duplicate label {i}")
        seen.add(i)
    seen_pairs: set[Pair] = set()
    for p, q in pairs:
        if (p, q) in seen_pairs:
            problems.append(f"duplicate edge ({p}, {q})")
        seen_pairs.add((p, q))
        for end in (p, q) if p != q else (p,):
            if end not in seen:
                problems.append(f"dangling endpoint {end} in edge ({p}, {q})")
        if p == q and not allow_loops:
            problems.append(f"loop ({p}, {p}) not allowed")
    return problems


def graph_from_literal(lit: Mapping[str, Any]) -> Graph:
    """Build a graph from ``{"vertices": [{id, attr}], "edges": [{from, to, weight}]}``.

    :raises GraphError: listing every violation found
    """
    problems = validate(lit)
    if problems:
        raise GraphError(problems)
    try:
        verts = {int(v["id"]): float(v.get("attr", 0.0)) for v in lit.get("vertices", [])}
        edges = {
            (int(e["from"]), int(e["to"])): float(e.get("weight", 0.0)) for e in lit.get("edges", [])
        }
    except (TypeError, ValueError) as exc:
        raise GraphError([f"non-numeric value in graph literal: {exc}"]) from exc
    return Graph(verts, edges, allow_loops=bool(lit.get("allow_loops", True)))
