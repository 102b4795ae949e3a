"""Processes of Petri nets under the collective token interpretation."""

from .conflict import (
    Classification,
    ConflictWitness,
    classify,
    has_reachable_structural_conflict,
    in_conflict,
    is_binary_conflict_free,
    is_conflict_free,
    is_persistent,
    is_structural_conflict_net,
    structural_conflict_pairs,
)
from .multiset import Multiset, MultiplicityOverflow
from .net import (
    MarkingGraph,
    Net,
    NetValidationError,
    NotEnabledError,
    enabled,
    fire_sequence,
    fire_step,
    postset,
    preset,
    reachable_markings,
    validate_net,
)
from .process import (
    Process,
    ProcessValidationError,
    canonical_form,
    enumerate_processes,
    final_marking,
    initial_process,
    is_prefix,
    isomorphic,
    successors,
    validate_process,
)
from .swapping import (
    bd_approximations,
    bd_preorder_fin,
    common_extension,
    legal_swaps,
    one_step_equiv,
    order_relation,
    swap,
    swap_equiv,
)
from .verdict import Status, Verdict

__version__ = "0.1.0"

__all__ = [
    "Classification", "ConflictWitness", "MarkingGraph", "Multiset", "MultiplicityOverflow",
    "Net", "NetValidationError", "NotEnabledError", "Process", "ProcessValidationError",
    "Status", "Verdict", "bd_approximations", "bd_preorder_fin", "canonical_form", "classify",
    "common_extension", "enabled", "enumerate_processes", "final_marking", "fire_sequence",
    "fire_step", "has_reachable_structural_conflict", "in_conflict", "initial_process",
    "is_binary_conflict_free", "is_conflict_free", "is_persistent", "is_prefix",
    "is_structural_conflict_net", "isomorphic", "legal_swaps", "one_step_equiv",
    "order_relation", "postset", "preset", "reachable_markings", "structural_conflict_pairs",
    "successors", "swap", "swap_equiv", "validate_net", "validate_process",
]
