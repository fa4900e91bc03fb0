"""Joint Pauli-twisted measurement basis on A'A and Born-rule sampling.

Outcome labels are tuples ``(i_1, .., i_n)`` with ``i_j`` in 0..3. They are
enumerated lexicographically, which makes the flat outcome index the base-4
number ``i_1 i_2 .. i_n`` and the classical message the 2n-bit big-endian
string of that number.
"""
from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .bases import OrthonormalBasis
from .qcore import num_qubits, pauli_string

PauliLabels = tuple[int, ...]


class ZeroProbabilityOutcome(ValueError):
    """Projection onto an outcome that has (numerically) zero probability."""

    def __init__(self, outcome: PauliLabels, probability: float):
        super().__init__(f"outcome {list(outcome)} has probability {probability:.3g}")
        self.outcome = outcome
        self.probability = probability


def validate_labels(labels: Sequence[int], n: int | None = None) -> PauliLabels:
    labels = tuple(int(i) for i in labels)
    if n is not None and len(labels) != n:
        raise ValueError(f"expected {n} Pauli labels, got {len(labels)}")
    if not labels or any(i not in (0, 1, 2, 3) for i in labels):
        raise ValueError(f"Pauli labels must be a nonempty list of values in 0..3, got {list(labels)}")
    return labels


def all_labels(n: int) -> list[PauliLabels]:
    return list(itertools.product(range(4), repeat=n))


def label_index(labels: Sequence[int]) -> int:
    idx = 0
    for i in labels:
        idx = 4 * idx + int(i)
    return idx


def index_labels(index: int, n: int) -> PauliLabels:
    out = []
    for _ in range(n):
        index, i = divmod(index, 4)
        out.append(i)
    return tuple(reversed(out))


def labels_to_bits(labels: Sequence[int]) -> str:
    return "".join(format(int(i), "02b") for i in labels)


def bits_to_labels(bits: str) -> PauliLabels:
    if len(bits) % 2 or set(bits) - {"0", "1"}:
        raise ValueError(f"not an even-length bit string: {bits!r}")
    return tuple(int(bits[k : k + 2], 2) for k in range(0, len(bits), 2))


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Row ``label_index(l)`` of ``vectors`` is |Pi_l> over 2n qubits (A' then A)."""

    n: int
    vectors: np.ndarray

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def vector(self, labels: Sequence[int]) -> np.ndarray:
        return self.vectors[label_index(validate_labels(labels, self.n))]

    def gram(self) -> np.ndarray:
        return self.vectors.conj() @ self.vectors.T


def pi_zero_matrix(basis_a: OrthonormalBasis, basis_b: OrthonormalBasis) -> np.ndarray:
    """|Pi_0..0> reshaped to a (A', A) matrix: (1/sqrt d) sum_K |K'> <K|^T."""
    d = len(basis_a)
    return basis_b.matrix @ basis_a.matrix.T / math.sqrt(d)


def build_pi_basis(basis_a: OrthonormalBasis, basis_b: OrthonormalBasis) -> MeasurementBasis:
    """Pauli strings on A' applied to (1/sqrt 2^n) sum_K |K'>_{A'} |K>_A."""
    if basis_a.n != basis_b.n:
        raise ValueError(f"basis sizes differ: {basis_a.n} vs {basis_b.n} qubits")
    n = basis_a.n
    m0 = pi_zero_matrix(basis_a, basis_b)
    vecs = np.stack([(pauli_string(l) @ m0).reshape(-1) for l in all_labels(n)])
    vecs.setflags(write=False)
    return MeasurementBasis(n, vecs)


def _contract(joint: np.ndarray, basis: MeasurementBasis) -> np.ndarray:
    """Row l: the unnormalized B-side residual <Pi_l|_{A'A} |joint>."""
    n = basis.n
    if num_qubits(joint) != 3 * n:
        raise ValueError(f"joint state must span {3 * n} qubits (A' A B) for n={n}")
    return basis.vectors.conj() @ joint.reshape(4**n, 2**n)


def born_probabilities(joint: np.ndarray, basis: MeasurementBasis) -> np.ndarray:
    c = _contract(joint, basis)
    return np.einsum("lb,lb->l", c.conj(), c).real


def project(
    joint: np.ndarray, basis: MeasurementBasis, outcome: Sequence[int], min_probability: float = 1e-14
) -> tuple[np.ndarray, float]:
    """Renormalized B-side state after observing ``outcome``, and its probability."""
    outcome = validate_labels(outcome, basis.n)
    residual = basis.vectors[label_index(outcome)].conj() @ joint.reshape(4**basis.n, 2**basis.n)
    prob = float(np.vdot(residual, residual).real)
    if prob <= min_probability:
        raise ZeroProbabilityOutcome(outcome, prob)
    return residual / math.sqrt(prob), prob


def _inverse_cdf(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(probs) - 1)


def sample_outcome(joint: np.ndarray, basis: MeasurementBasis, seed: int) -> PauliLabels:
    """Draw one outcome by inverse CDF from a private generator seeded with ``seed``."""
    probs = born_probabilities(joint, basis)
    u = np.random.default_rng(seed).random()
    return index_labels(int(_inverse_cdf(probs, np.array([u]))[0]), basis.n)


def sample_outcomes(probs: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """Flat outcome indices for ``shots`` draws from a fixed distribution."""
    u = np.random.default_rng(seed).random(shots)
    return _inverse_cdf(np.asarray(probs, dtype=float), u)


def outcome_record(labels: Sequence[int], probability: float) -> dict:
    return {"labels": list(labels), "bits": labels_to_bits(labels), "probability": probability}
