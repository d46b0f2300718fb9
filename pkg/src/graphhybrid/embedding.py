"""Bijection between graphs and canonical states."""

from __future__ import annotations

import numpy as np

from .graph_core import Graph
from .variable_basis import BasisSet, State, StateError, validate_state


def phi(g: Graph) -> State:
    """Map a graph to its state: attributes on the vertex labels, weights and
    adjacency over the full square, zero-filled where there is no edge."""
    basis = BasisSet(tuple(g.vertices))
    idx = basis.index()
    n = len(basis)
    x = np.array([g.vertices[i] for i in basis.labels], dtype=float)
    w = np.zeros((n, n))
    a = np.zeros((n, n), dtype=bool)
    for (p, q), weight in g.edges.items():
        w[idx[p], idx[q]] = weight
        a[idx[p], idx[q]] = True
    return State(basis, x, w, a, g.allow_loops)


def phi_inv(x: State) -> Graph:
    """Inverse of :func:`phi`. Zero-weight edges survive; existence lives in ``a``.

    :raises StateError: if ``x`` is not canonical
    """
    problems = validate_state(x)
    if problems:
        raise StateError("state is not the image of a graph: " + "; ".join(problems))
    labels = x.basis.labels
    verts = {lab: float(v) for lab, v in zip(labels, x.x)}
    rows, cols = np.nonzero(x.a)
    edges = {(labels[i], labels[j]): float(x.w[i, j]) for i, j in zip(rows, cols)}
    return Graph(verts, edges, allow_loops=x.allow_loops)
