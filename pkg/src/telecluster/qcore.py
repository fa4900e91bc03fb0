"""Dense state-vector and operator kernels.

States are 1-D complex numpy arrays of length ``2**m``; operators and density
matrices are square complex arrays. Qubits are indexed from 0 and qubit 0 is
the most significant bit of the amplitude index, so ``|q0 q1 ... q_{m-1}>``
reads directly as a binary index.
"""
from __future__ import annotations

import os
from collections.abc import Sequence
from functools import reduce

import numpy as np

DEFAULT_QUBIT_CAP = 24
STRUCT_TOL = 1e-12
PROTOCOL_TOL = 1e-10

_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _p in _PAULIS:
    _p.setflags(write=False)


class QubitCapExceeded(ValueError):
    pass


def qubit_cap() -> int:
    """Maximum joint qubit count; ``TELECLUSTER_QUBIT_CAP`` overrides the default."""
    raw = os.environ.get("TELECLUSTER_QUBIT_CAP")
    if raw is None:
        return DEFAULT_QUBIT_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"TELECLUSTER_QUBIT_CAP must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ValueError("TELECLUSTER_QUBIT_CAP must be positive")
    return cap


def check_cap(num_qubits: int) -> None:
    cap = qubit_cap()
    if num_qubits > cap:
        raise QubitCapExceeded(f"{num_qubits} joint qubits exceeds the cap of {cap}")


def num_qubits(x: np.ndarray) -> int:
    """Qubit count of a state vector or square operator."""
    dim = x.shape[0]
    m = dim.bit_length() - 1
    if dim < 1 or 1 << m != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if x.ndim == 2 and x.shape[1] != dim:
        raise ValueError(f"operator is not square: {x.shape}")
    return m


def as_state(amps, normalized: bool = False) -> np.ndarray:
    psi = np.asarray(amps, dtype=complex).reshape(-1)
    num_qubits(psi)
    if normalized:
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > STRUCT_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r})")
    return psi


def basis_state(bits: str) -> np.ndarray:
    """Computational basis vector for a bit string such as ``"0110"``."""
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int(bits, 2)] = 1.0
    return psi


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state on ``n`` qubits."""
    psi = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return psi / np.linalg.norm(psi)


def kron(*factors: np.ndarray) -> np.ndarray:
    """Tensor product; earlier factors occupy the more significant qubits."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    ndims = {f.ndim for f in factors}
    if len(ndims) != 1:
        raise ValueError("cannot mix state vectors and operators in kron")
    return reduce(np.kron, factors)


def pauli(label: int) -> np.ndarray:
    """I, X, Y, Z for labels 0..3 (Y = [[0, -i], [i, 0]])."""
    if label not in (0, 1, 2, 3):
        raise ValueError(f"Pauli label must be in 0..3, got {label!r}")
    return _PAULIS[label]


def pauli_string(labels: Sequence[int]) -> np.ndarray:
    """Tensor product of Paulis, ``labels[0]`` on the most significant qubit."""
    if len(labels) == 0:
        raise ValueError("empty Pauli string")
    return kron(*(pauli(int(i)) for i in labels))


def _validate_targets(targets: Sequence[int], m: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits: {targets}")
    for t in targets:
        if not 0 <= t < m:
            raise ValueError(f"target qubit {t} out of range for {m} qubits")
    return targets


def apply_on_subsystems(op: np.ndarray, targets: Sequence[int], state: np.ndarray) -> np.ndarray:
    """Apply ``op`` to the listed qubits (in the given order), identity elsewhere."""
    m = num_qubits(state)
    targets = _validate_targets(targets, m)
    k = len(targets)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} target qubits")
    psi = state.reshape([2] * m)
    psi = np.moveaxis(psi, targets, range(k)).reshape(2**k, -1)
    psi = (op @ psi).reshape([2] * m)
    return np.moveaxis(psi, range(k), targets).reshape(-1)


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.shape != b.shape:
        raise ValueError(f"size mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def fidelity_pure(a: np.ndarray, b: np.ndarray) -> float:
    return float(min(1.0, abs(inner(a, b)) ** 2))


def density(state: np.ndarray) -> np.ndarray:
    return np.outer(state, state.conj())


def partial_trace(x: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on ``keep`` (kept qubits retain their relative order).

    ``x`` is either a pure state vector or a density matrix.
    """
    m = num_qubits(x)
    keep = sorted(_validate_targets(keep, m))
    if not keep:
        raise ValueError("keep set must be nonempty")
    rest = [q for q in range(m) if q not in keep]
    dk = 2 ** len(keep)
    if x.ndim == 1:
        psi = np.transpose(x.reshape([2] * m), keep + rest).reshape(dk, -1)
        return psi @ psi.conj().T
    rho = x.reshape([2] * (2 * m))
    rho = np.transpose(rho, keep + rest + [m + q for q in keep] + [m + q for q in rest])
    dr = 2 ** len(rest)
    rho = rho.reshape(dk, dr, dk, dr)
    return np.einsum("ajbj->ab", rho)


def permute_qubits(state: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Reorder qubits so that output qubit ``j`` is input qubit ``perm[j]``."""
    m = num_qubits(state)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(m)):
        raise ValueError(f"{perm} is not a permutation of {m} qubits")
    return np.transpose(state.reshape([2] * m), perm).reshape(-1)


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for j, p in enumerate(perm):
        inv[p] = j
    return inv


def purity(rho: np.ndarray) -> float:
    """tr(rho^2) for a density matrix."""
    return float(np.real(np.einsum("ij,ji->", rho, rho)))


def is_unitary(op: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    return unitarity_deviation(op) <= tol


def unitarity_deviation(op: np.ndarray) -> float:
    return float(np.max(np.abs(op @ op.conj().T - np.eye(op.shape[0]))))


def density_matrix_violations(rho: np.ndarray, tol: float = STRUCT_TOL) -> list[str]:
    """Return human-readable reasons ``rho`` is not a valid density matrix."""
    problems = []
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol:
        problems.append(f"not Hermitian (max deviation {herm:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        problems.append(f"trace {tr:.15g} != 1")
    low = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if low < -tol:
        problems.append(f"negative eigenvalue {low:.3g}")
    return problems
