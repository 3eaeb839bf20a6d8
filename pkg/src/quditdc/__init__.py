"""Distributed dense coding on qudit stabilizer states.

The package models generalized Pauli words on n qudits of dimension d,
validates stabilizer generating sets, block-reduces prime-dimension
stabilizers to derive sender/receiver partitions, synthesizes encoding
protocols by two routes (free column sets and basis chains), and checks
the resulting protocols both algebraically (label distinctness) and
numerically (state-vector orthogonality).
"""

from .densecode import (
    BoundReport,
    ChainChoices,
    ChainPick,
    ChainStep,
    ChainTrace,
    ColumnSetsResult,
    Partition,
    Protocol,
    SenderSubspace,
    bounded_factor_vectors,
    check_bounds,
    protocol_from_free_sets,
    sender_subspaces,
    synth_basis_chain,
    synth_column_sets,
    verify_protocol,
)
from .errors import InternalError, ResourceLimitError, UsageError
from .io import (
    canonical_json,
    load_protocol,
    load_stabilizer,
    protocol_from_obj,
    protocol_to_obj,
    save_protocol,
    save_stabilizer,
    stabilizer_hash,
)
from .modring import (
    ModVec,
    RingBasis,
    SpanSet,
    coordinates_in_basis,
    enumerate_span,
    is_prime,
    linear_independent,
    smith_normal_form,
    solve_mod,
    span_in_coefficient_order,
    span_membership,
    span_size,
)
from .pauli import (
    PauliWord,
    commutes,
    dense_matrix,
    is_admissible_generator,
    multiply,
    root_of_unity,
    symplectic_product,
    symplectic_vector,
    word_power,
)
from .simulator import (
    OrthReport,
    StateVector,
    apply_encoding,
    apply_word,
    build_state,
    orthogonality_check,
    state_label,
    word_action,
)
from .stabilizer import (
    CheckMatrix,
    SingletonPartitionResult,
    StandardForm,
    ValidationReport,
    optimal_singleton_partition,
    restricted_commutation,
    standard_form,
    validate,
    word_label,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ChainChoices",
    "ChainPick",
    "ChainStep",
    "ChainTrace",
    "CheckMatrix",
    "ColumnSetsResult",
    "InternalError",
    "ModVec",
    "OrthReport",
    "Partition",
    "PauliWord",
    "Protocol",
    "ResourceLimitError",
    "RingBasis",
    "SenderSubspace",
    "SingletonPartitionResult",
    "SpanSet",
    "StandardForm",
    "StateVector",
    "UsageError",
    "ValidationReport",
    "apply_encoding",
    "apply_word",
    "bounded_factor_vectors",
    "build_state",
    "canonical_json",
    "check_bounds",
    "commutes",
    "coordinates_in_basis",
    "dense_matrix",
    "enumerate_span",
    "is_admissible_generator",
    "is_prime",
    "linear_independent",
    "load_protocol",
    "load_stabilizer",
    "multiply",
    "optimal_singleton_partition",
    "orthogonality_check",
    "protocol_from_free_sets",
    "protocol_from_obj",
    "protocol_to_obj",
    "restricted_commutation",
    "root_of_unity",
    "save_protocol",
    "save_stabilizer",
    "sender_subspaces",
    "smith_normal_form",
    "solve_mod",
    "span_in_coefficient_order",
    "span_membership",
    "span_size",
    "stabilizer_hash",
    "standard_form",
    "state_label",
    "symplectic_product",
    "symplectic_vector",
    "synth_basis_chain",
    "synth_column_sets",
    "validate",
    "verify_protocol",
    "word_action",
    "word_label",
    "word_power",
]
