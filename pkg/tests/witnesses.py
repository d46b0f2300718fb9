"""Stored counterexamples and the small exhaustive invertibility search."""

import itertools

from graphhybrid.graph_core import Graph

# (X, Z, Y) with X != Z but X * Y == Z * Y
NON_CANCEL_UNION = (Graph(), Graph({1: 0.0}), Graph({1: 0.5}))
NON_CANCEL_INTER = (Graph({1: 1.0, 2: 5.0}), Graph({1: 1.0, 3: 7.0}), Graph({1: 2.0}))
ONE = Graph({1: 1.0})
DIST_X, DIST_Y, DIST_Z = ONE, ONE, ONE
ORDER_X, ORDER_Y, ORDER_Z = ONE, ONE, Graph({2: 1.0})


def _topologies(universe, allow_loops):
    """Every (labels, pairs) topology over ``universe``."""
    for r in range(len(universe) + 1):
        for labels in itertools.combinations(universe, r):
            cand = [(p, q) for p in labels for q in labels if allow_loops or p != q]
            for m in range(len(cand) + 1):
                for pairs in itertools.combinations(cand, m):
                    yield labels, pairs


def _graph(labels, pairs, allow_loops, seed=0.0):
    return Graph(
        {i: 0.5 + seed + 0.25 * n for n, i in enumerate(labels)},
        {e: -0.75 + seed + 0.5 * n for n, e in enumerate(pairs)},
        allow_loops=allow_loops,
    )


def _best_inverse(g, labels, pairs, allow_loops):
    """Candidate with this topology that cancels ``g`` wherever they overlap."""
    return Graph(
        {i: -g.vertices.get(i, 0.0) for i in labels},
        {e: -g.edges.get(e, 0.0) for e in pairs},
        allow_loops=allow_loops,
    )


def invertibility_search(op, identity, universe, allow_loops):
    """Map each graph topology to whether some candidate inverts it."""
    tops = list(_topologies(universe, allow_loops))
    found = {}
    for labels, pairs in tops:
        g = _graph(labels, pairs, allow_loops)
        found[(labels, pairs)] = any(
            op(g, _best_inverse(g, hl, hp, allow_loops)) == identity for hl, hp in tops
        )
    return found
