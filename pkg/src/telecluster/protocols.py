"""Teleportation and dense coding over a :class:`ResourceState`."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .measurement import (
    MeasurementBasis,
    PauliLabels,
    all_labels,
    build_pi_basis,
    label_index,
    labels_to_bits,
    pi_zero_matrix,
    project,
    sample_outcome,
    validate_labels,
)
from .qcore import (
    STRUCT_TOL,
    apply_on_subsystems,
    as_state,
    check_cap,
    fidelity_pure,
    kron,
    num_qubits,
    partial_trace,
    pauli_string,
)
from .resource import ResourceState
from .serialization import state_to_dict

DECODE_THRESHOLD = 1 - 1e-9


class UndecodableError(ValueError):
    def __init__(self, best: PauliLabels, overlap: float):
        super().__init__(f"no codeword overlaps the state above threshold (best {list(best)}: {overlap:.6g})")
        self.best = best
        self.overlap = overlap


@dataclass(frozen=True, eq=False)
class TeleportRecord:
    outcome: PauliLabels
    probability: float
    bob_pre: np.ndarray
    correction: PauliLabels
    bob_post: np.ndarray
    fidelity: float

    @property
    def bits(self) -> str:
        return labels_to_bits(self.outcome)

    def to_dict(self) -> dict:
        return {
            "outcome": list(self.outcome),
            "bits": self.bits,
            "probability": self.probability,
            "bob_pre": state_to_dict(self.bob_pre),
            "correction": list(self.correction),
            "bob_post": state_to_dict(self.bob_post),
            "fidelity": self.fidelity,
        }


@dataclass(frozen=True, eq=False)
class DenseCodingRecord:
    message: PauliLabels
    encoded: np.ndarray
    decoded: PauliLabels

    @property
    def ok(self) -> bool:
        return self.decoded == self.message

    def to_dict(self) -> dict:
        return {
            "message": list(self.message),
            "bits": labels_to_bits(self.message),
            "encoded": state_to_dict(self.encoded),
            "decoded": list(self.decoded),
        }


def _check_phi(phi: np.ndarray, r: ResourceState) -> np.ndarray:
    phi = as_state(phi, normalized=True)
    if num_qubits(phi) != r.n:
        raise ValueError(f"input has {num_qubits(phi)} qubits but the resource carries n={r.n}")
    check_cap(3 * r.n)
    return phi


def _record(phi, joint, basis: MeasurementBasis, outcome: PauliLabels) -> TeleportRecord:
    bob_pre, prob = project(joint, basis, outcome)
    # Paulis are involutive, so the correction is the outcome string itself
    bob_post = pauli_string(outcome) @ bob_pre
    return TeleportRecord(outcome, prob, bob_pre, outcome, bob_post, fidelity_pure(bob_post, phi))


def teleport_once(phi: np.ndarray, r: ResourceState, seed: int, basis: MeasurementBasis | None = None) -> TeleportRecord:
    phi = _check_phi(phi, r)
    basis = basis or build_pi_basis(r.basis_a, r.basis_b)
    joint = kron(phi, r.state)
    return _record(phi, joint, basis, sample_outcome(joint, basis, seed))


def teleport_exhaustive(phi: np.ndarray, r: ResourceState, basis: MeasurementBasis | None = None) -> list[TeleportRecord]:
    """One record per outcome, in label order."""
    phi = _check_phi(phi, r)
    basis = basis or build_pi_basis(r.basis_a, r.basis_b)
    joint = kron(phi, r.state)
    return [_record(phi, joint, basis, l) for l in all_labels(r.n)]


def verify_decomposition(phi: np.ndarray, r: ResourceState, basis: MeasurementBasis | None = None) -> float:
    """|| phi (x) xi - 2^-n sum_l |Pi_l> (x) P_l phi ||."""
    phi = _check_phi(phi, r)
    basis = basis or build_pi_basis(r.basis_a, r.basis_b)
    n = r.n
    corrected = np.stack([pauli_string(l) @ phi for l in all_labels(n)])
    rhs = (basis.vectors.T @ corrected).reshape(-1) / 2**n
    return float(np.linalg.norm(kron(phi, r.state) - rhs))


def transfer_matrix(r: ResourceState, swap_roles: bool = False) -> np.ndarray:
    """Matrix of the A' -> B map <Pi_0..0|_{A'A} |xi>_{AB}, in computational bases.

    ``swap_roles`` builds Pi with the A- and B-side bases exchanged.
    """
    a, b = (r.basis_b, r.basis_a) if swap_roles else (r.basis_a, r.basis_b)
    m0 = pi_zero_matrix(a, b)
    d = 2**r.n
    xi = r.state.reshape(d, d)
    # T[b, a'] = sum_a conj(M0[a', a]) xi[a, b]
    return (m0.conj() @ xi).T


def transfer_operator_check(r: ResourceState, swap_roles: bool = False) -> float:
    d = 2**r.n
    return float(np.max(np.abs(transfer_matrix(r, swap_roles) - np.eye(d) / d)))


def dense_encode(r: ResourceState, message: Sequence[int]) -> np.ndarray:
    message = validate_labels(message, r.n)
    return apply_on_subsystems(pauli_string(message), range(r.n), r.state)


def dense_codebook(r: ResourceState) -> np.ndarray:
    """Rows are the encoded states for every message, in label order."""
    return np.stack([dense_encode(r, m) for m in all_labels(r.n)])


def dense_decode(r: ResourceState, encoded: np.ndarray, codebook: np.ndarray | None = None) -> PauliLabels:
    """Joint measurement over all 2n qubits in the codeword basis."""
    encoded = as_state(encoded)
    if num_qubits(encoded) != 2 * r.n:
        raise ValueError(f"encoded state must span {2 * r.n} qubits")
    book = dense_codebook(r) if codebook is None else codebook
    overlaps = np.abs(book.conj() @ encoded) ** 2
    best = int(np.argmax(overlaps))
    labels = all_labels(r.n)
    if overlaps[best] < DECODE_THRESHOLD:
        raise UndecodableError(labels[best], float(overlaps[best]))
    return labels[best]


def dense_round_trip(r: ResourceState, messages: Sequence[Sequence[int]] | None = None) -> list[DenseCodingRecord]:
    book = dense_codebook(r)
    msgs = all_labels(r.n) if messages is None else [validate_labels(m, r.n) for m in messages]
    return [DenseCodingRecord(m, book[label_index(m)], dense_decode(r, book[label_index(m)], book)) for m in msgs]


@dataclass(frozen=True)
class GramReport:
    max_offdiag: float
    max_diag_deviation: float
    max_marginal_deviation: float

    def ok(self, tol: float = 1e-10, marginal_tol: float = STRUCT_TOL) -> bool:
        return (
            self.max_offdiag <= tol
            and self.max_diag_deviation <= tol
            and self.max_marginal_deviation <= marginal_tol
        )


def dense_gram_check(r: ResourceState) -> GramReport:
    """Gram matrix of all 4^n codewords, plus their A-half marginals against I/2^n."""
    book = dense_codebook(r)
    gram = book.conj() @ book.T
    off = gram - np.diag(np.diag(gram))
    d = 2**r.n
    marg = max(
        float(np.max(np.abs(partial_trace(v, range(r.n)) - np.eye(d) / d))) for v in book
    )
    return GramReport(
        max_offdiag=float(np.max(np.abs(off))) if len(book) > 1 else 0.0,
        max_diag_deviation=float(np.max(np.abs(np.diag(gram) - 1))),
        max_marginal_deviation=marg,
    )
