"""The 2n-qubit shared resource and its reference states.

Resource qubits are ordered ``A_1 .. A_n B_1 .. B_n``.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .bases import AngleSchedule, OrthonormalBasis, build_basis_a, build_basis_b, computational_basis
from .qcore import check_cap, kron, partial_trace, permute_qubits

# |xi_0> terms as printed, qubit order A1 A2 A3 B1 B2 B3
CLUSTER6_TERMS = (
    ("110111", +1),
    ("111110", -1),
    ("101101", -1),
    ("100100", +1),
    ("000000", +1),
    ("001001", +1),
    ("010011", +1),
    ("011010", +1),
)


@dataclass(frozen=True, eq=False)
class ResourceState:
    state: np.ndarray
    basis_a: OrthonormalBasis
    basis_b: OrthonormalBasis
    schedule_a: AngleSchedule | None = None
    schedule_b: AngleSchedule | None = None

    @property
    def n(self) -> int:
        return self.basis_a.n

    def a_marginal(self) -> np.ndarray:
        return partial_trace(self.state, range(self.n))

    def to_dict(self) -> dict:
        from .serialization import state_to_dict

        out = state_to_dict(self.state)
        out["n"] = self.n
        out["schedule_a"] = self.schedule_a.to_dict() if self.schedule_a else None
        out["schedule_b"] = self.schedule_b.to_dict() if self.schedule_b else None
        return out


def build_resource(
    basis_a: OrthonormalBasis,
    basis_b: OrthonormalBasis,
    schedule_a: AngleSchedule | None = None,
    schedule_b: AngleSchedule | None = None,
) -> ResourceState:
    """(1/sqrt(2^n)) sum_K |K>_A (x) |K'>_B."""
    if basis_a.n != basis_b.n:
        raise ValueError(f"basis sizes differ: {basis_a.n} vs {basis_b.n} qubits")
    check_cap(2 * basis_a.n)
    d = len(basis_a)
    # sum_K a_K (x) b_K is the row-major flattening of A @ B^T
    state = (basis_a.matrix @ basis_b.matrix.T).reshape(-1) / math.sqrt(d)
    state.setflags(write=False)
    return ResourceState(state, basis_a, basis_b, schedule_a, schedule_b)


def resource_from_schedules(
    schedule_a: AngleSchedule, schedule_b: AngleSchedule, uniform_signs: bool = False
) -> ResourceState:
    if schedule_a.n != schedule_b.n:
        raise ValueError(f"schedule sizes differ: {schedule_a.n} vs {schedule_b.n}")
    return build_resource(
        build_basis_a(schedule_a, uniform_signs=uniform_signs),
        build_basis_b(schedule_b),
        schedule_a,
        schedule_b,
    )


def computational_resource(n: int) -> ResourceState:
    basis = computational_basis(n)
    return build_resource(basis, basis)


def cluster6_reference() -> np.ndarray:
    psi = np.zeros(64, dtype=complex)
    for bits, sign in CLUSTER6_TERMS:
        psi[int(bits, 2)] = sign / (2 * math.sqrt(2))
    return psi


def cluster6_schedule(theta1: float, theta2: float, theta3: float) -> tuple[AngleSchedule, AngleSchedule]:
    """Angles with theta_1 = theta_1', theta_2 + theta_2' = pi/2, theta_3 = theta_3', theta_4 = 0, theta_4' = pi/2."""
    a = AngleSchedule.with_last_level((theta1, theta2, theta3, 0.0))
    b = AngleSchedule.with_last_level((theta1, math.pi / 2 - theta2, theta3, math.pi / 2))
    return a, b


def interleave_permutation(n: int) -> list[int]:
    """Permutation taking ``A_1..A_n B_1..B_n`` to ``A_1 B_1 A_2 B_2 ..``."""
    perm = []
    for i in range(n):
        perm += [i, n + i]
    return perm


def deinterleave_permutation(n: int) -> list[int]:
    """Permutation taking ``A_1 B_1 A_2 B_2 ..`` to ``A_1..A_n B_1..B_n``."""
    return [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)]


def bell_pair() -> np.ndarray:
    return np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)


def bell_product_reference(n: int) -> np.ndarray:
    """n Bell pairs (|00>+|11>)/sqrt2 on (A_i, B_i), returned in A..B order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return permute_qubits(kron(*[bell_pair()] * n), deinterleave_permutation(n))


def reduced_last_pair(r: ResourceState) -> np.ndarray:
    """rho on (A_n, B_n) after tracing out every other qubit."""
    return partial_trace(r.state, [r.n - 1, 2 * r.n - 1])


def closed_form_block(a_angles: Sequence[float], b_angles: Sequence[float]) -> tuple[float, float]:
    """Entries <00|rho|00> and <00|rho|11> of rho_{A3B3} for the three-qubit family.

    Returns ``(c_diag, c_off)``; both are the bracketed cosine sums divided by 8.
    """
    if len(a_angles) != 4 or len(b_angles) != 4:
        raise ValueError("closed_form_block needs four last-level angles per side")
    t, tp = a_angles, b_angles
    c1 = math.cos(t[0] - tp[0]) ** 2
    c2 = math.cos(t[1] + tp[1]) ** 2
    c3 = math.cos(t[2] - tp[2]) ** 2
    c4 = math.cos(t[3] - tp[3]) ** 2
    return (c1 + c2 + c3 + c4) / 8, (c1 - c2 + c3 + c4) / 8
