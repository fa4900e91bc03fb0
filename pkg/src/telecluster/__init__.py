"""Teleportation and dense coding over generalized cluster-like 2n-qubit states."""
from .analysis import BellVerdict, MatchReport, bell_product_witness, cluster4_reference, match_up_to_phase_perm, search_cluster_angles_n2
from .bases import (
    AngleSchedule,
    OrthonormalBasis,
    basis_from_columns,
    build_basis_a,
    build_basis_b,
    coefficients_in_basis,
    computational_basis,
)
from .measurement import MeasurementBasis, born_probabilities, build_pi_basis, project, sample_outcome
from .protocols import (
    DenseCodingRecord,
    TeleportRecord,
    dense_decode,
    dense_encode,
    dense_gram_check,
    teleport_exhaustive,
    teleport_once,
    transfer_operator_check,
    verify_decomposition,
)
from .qcore import (
    apply_on_subsystems,
    fidelity_pure,
    inner,
    kron,
    partial_trace,
    pauli,
    permute_qubits,
    purity,
)
from .resource import (
    ResourceState,
    bell_product_reference,
    build_resource,
    closed_form_block,
    cluster6_reference,
    cluster6_schedule,
    reduced_last_pair,
    resource_from_schedules,
)

__version__ = "0.1.0"
