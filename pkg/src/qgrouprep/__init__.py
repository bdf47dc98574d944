"""Finite groups as quantum circuits.

Two routes from a finite group to qubit unitaries: exact synthesis from a
permutation or classical matrix representation, and variational training of
generator circuits against an absolute presentation.
"""

from ._accel import BACKEND
from .applications import (
    OracleFunction,
    coset_oracle,
    grover_step,
    hsp_initial_state,
    linear_order,
    multiplicative_order,
    projective_order,
    qme_operator,
    validate_hiding,
)
from .circuits import Circuit, Gate, apply, circuit_unitary, match_named_gate
from .decompose import decompose_permutation, decompose_unitary
from .group import (
    FiniteGroup,
    Permutation,
    Presentation,
    Word,
    closure,
    evaluate_word,
    load_group_spec,
    verify_presentation,
)
from .linalg import canonical_state, is_unitary, projective_distance, projective_equal
from .reps import (
    QuantumRepresentation,
    cayley_quantum_rep,
    check_faithful,
    classical_to_quantum_rep,
    orbit,
    stabilizer,
    torsor_point,
)
from .vqa import (
    AnsatzConfig,
    AnsatzParams,
    ansatz_circuit,
    extract_representation,
    relation_cost,
    tie_parameters,
    train,
    verify_irrelations,
    word_circuit,
)

__version__ = "0.1.0"
