"""Hybrid dynamical systems on labeled, weighted, attributed graphs."""

from .embedding import phi, phi_inv
from .graph_core import (
    EMPTY,
    Graph,
    GraphError,
    decompose,
    disjoint_union,
    graph_diff,
    graph_from_literal,
    identity_inter,
    inter_add,
    scalar_mul,
    union_add,
    validate,
)
from .hybrid import (
    Disturbance,
    FlowMap,
    HybridArc,
    JumpCase,
    JumpConfig,
    ScheduledInput,
    SolverError,
    apply_jump,
    classify_jump,
    solve,
)
from .variable_basis import (
    BasisSet,
    PairBasis,
    State,
    StateError,
    classify_state,
    state_combine,
    state_scalar_mul,
    validate_state,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSet",
    "Disturbance",
    "EMPTY",
    "FlowMap",
    "Graph",
    "GraphError",
    "HybridArc",
    "JumpCase",
    "JumpConfig",
    "PairBasis",
    "ScheduledInput",
    "SolverError",
    "State",
    "StateError",
    "apply_jump",
    "classify_jump",
    "classify_state",
    "decompose",
    "disjoint_union",
    "graph_diff",
    "graph_from_literal",
    "identity_inter",
    "inter_add",
    "phi",
    "phi_inv",
    "scalar_mul",
    "solve",
    "state_combine",
    "state_scalar_mul",
    "union_add",
    "validate",
    "validate_state",
]
