"""Parallel network-flow and assignment solvers with DIMACS tooling.

Exact-integer push-relabel max-flow (sequential and lock-free parallel),
a cost-scaling solver for maximum-weight perfect bipartite matching with a
lock-free parallel refine, brute-force oracles for testing, and DIMACS
instance I/O with a CLI front end.
"""

from __future__ import annotations

from .assign_par import lockfree_refine_round, refine_par
from .assign_scaling import (
    AssignmentInstance,
    InfeasibleInstanceError,
    OpCounters,
    ScalingState,
    arc_fix,
    begin_refine,
    extract_matching,
    make_scaling_state,
    min_cost_loop,
    price_update_heuristic,
    reduce_to_mincost,
    refine_seq,
    solve_assignment,
)
from .atomics import AtomicIntView
from .cli import cli_main
from .dimacs import (
    InstanceFile,
    ParseError,
    detect_kind,
    generate,
    parse_dimacs_asn,
    parse_dimacs_max,
    serialize_instance,
    serialize_network,
)
from .graph import (
    FlowNetwork,
    NetworkError,
    ResidualState,
    SolveReport,
    build_network,
    is_epsilon_optimal,
    part_reduced_cost,
    reduced_cost,
)
from .maxflow_par import (
    HybridState,
    cancel_violations,
    hybrid_init,
    hybrid_solve,
    lockfree_round,
)
from .maxflow_seq import (
    DischargeKind,
    DischargeResult,
    discharge,
    gap_relabel,
    global_relabel,
    init_preflow,
    solve_maxflow_seq,
)
from .oracles import ORACLE_SIZE_LIMIT, brute_force_assignment, edmonds_karp

__version__ = "0.1.0"

__all__ = [
    "AssignmentInstance",
    "AtomicIntView",
    "DischargeKind",
    "DischargeResult",
    "FlowNetwork",
    "HybridState",
    "InfeasibleInstanceError",
    "InstanceFile",
    "NetworkError",
    "OpCounters",
    "ORACLE_SIZE_LIMIT",
    "ParseError",
    "ResidualState",
    "ScalingState",
    "SolveReport",
    "arc_fix",
    "begin_refine",
    "brute_force_assignment",
    "build_network",
    "cancel_violations",
    "cli_main",
    "detect_kind",
    "discharge",
    "edmonds_karp",
    "extract_matching",
    "gap_relabel",
    "generate",
    "global_relabel",
    "hybrid_init",
    "hybrid_solve",
    "init_preflow",
    "is_epsilon_optimal",
    "lockfree_refine_round",
    "lockfree_round",
    "make_scaling_state",
    "min_cost_loop",
    "parse_dimacs_asn",
    "parse_dimacs_max",
    "part_reduced_cost",
    "price_update_heuristic",
    "reduce_to_mincost",
    "reduced_cost",
    "refine_par",
    "refine_seq",
    "serialize_instance",
    "serialize_network",
    "solve_assignment",
    "solve_maxflow_seq",
    "__version__",
]
