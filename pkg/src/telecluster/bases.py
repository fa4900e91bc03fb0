"""Angle-parameterized orthonormal basis families.

A basis on ``n`` qubits is built level by level. At level ``l`` every prefix
vector ``p`` of the level ``l-1`` basis is split into two children::

    child 2p   = prefix_p (x) ( cos t |0> + sin t |1>)
    child 2p+1 = prefix_p (x) (-sin t |0> + cos t |1>)

with ``t = levels[l-1][p]``. The A-side family printed for teleportation
differs at the top level only: pair ``p = 1`` uses ``(sin t, -cos t)`` for its
odd child. Lower levels are treated as the (otherwise arbitrary) prefix basis
and use the regular rule, so zero prefix angles give computational prefixes.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .qcore import STRUCT_TOL, num_qubits, unitarity_deviation


class Side(str, Enum):
    A = "A"
    B = "B"
    GENERIC = "GENERIC"


@dataclass(frozen=True)
class AngleSchedule:
    """Angles in radians; ``levels[l]`` holds ``2**l`` entries.

    The paper restricts angles to [0, pi/2]; any finite value is accepted here.
    """

    levels: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        levels = tuple(tuple(float(t) for t in lvl) for lvl in self.levels)
        if not levels:
            raise ValueError("schedule needs at least one level")
        for l, lvl in enumerate(levels):
            if len(lvl) != 2**l:
                raise ValueError(f"level {l + 1} must have {2**l} angles, got {len(lvl)}")
            if not all(math.isfinite(t) for t in lvl):
                raise ValueError(f"level {l + 1} contains a non-finite angle")
        object.__setattr__(self, "levels", levels)

    @property
    def n(self) -> int:
        return len(self.levels)

    @property
    def last_level(self) -> tuple[float, ...]:
        return self.levels[-1]

    @classmethod
    def zeros(cls, n: int) -> AngleSchedule:
        return cls(tuple((0.0,) * 2**l for l in range(n)))

    @classmethod
    def with_last_level(cls, angles: Sequence[float]) -> AngleSchedule:
        """Schedule whose prefix levels are zero (computational prefixes)."""
        n = len(angles).bit_length()
        if 2 ** (n - 1) != len(angles):
            raise ValueError(f"last level must have a power-of-two length, got {len(angles)}")
        return cls(tuple((0.0,) * 2**l for l in range(n - 1)) + (tuple(angles),))

    @classmethod
    def from_flat(cls, n: int, angles: Sequence[float]) -> AngleSchedule:
        """Build from ``2**n - 1`` angles (all levels, in order) or ``2**(n-1)`` (last level)."""
        angles = [float(t) for t in angles]
        if len(angles) == 2 ** (n - 1) and n > 1:
            return cls.with_last_level(angles)
        if len(angles) != 2**n - 1:
            raise ValueError(
                f"expected {2**n - 1} angles (all levels) or {2 ** (n - 1)} (last level) for n={n}, "
                f"got {len(angles)}"
            )
        levels, start = [], 0
        for l in range(n):
            levels.append(tuple(angles[start : start + 2**l]))
            start += 2**l
        return cls(tuple(levels))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, low: float = 0.0, high: float = math.pi / 2) -> AngleSchedule:
        return cls(tuple(tuple(rng.uniform(low, high, size=2**l)) for l in range(n)))

    def truncated(self, n: int) -> AngleSchedule:
        return AngleSchedule(self.levels[:n])

    def to_dict(self) -> dict:
        return {"n": self.n, "levels": [list(lvl) for lvl in self.levels]}

    @classmethod
    def from_dict(cls, data: dict) -> AngleSchedule:
        sched = cls(tuple(tuple(lvl) for lvl in data["levels"]))
        if "n" in data and int(data["n"]) != sched.n:
            raise ValueError(f"schedule declares n={data['n']} but has {sched.n} levels")
        return sched


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Ordered basis; column ``K`` of ``matrix`` is basis vector ``K``."""

    matrix: np.ndarray
    side: Side = Side.GENERIC

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        num_qubits(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return num_qubits(self.matrix)

    def __len__(self) -> int:
        return self.matrix.shape[1]

    def __getitem__(self, k: int) -> np.ndarray:
        return self.matrix[:, k]

    @property
    def vectors(self) -> list[np.ndarray]:
        return [self.matrix[:, k] for k in range(len(self))]

    def gram(self) -> np.ndarray:
        return self.matrix.conj().T @ self.matrix


def _build(levels: Sequence[Sequence[float]], anomalous_top: bool) -> np.ndarray:
    # rows are basis vectors while building
    vecs = np.ones((1, 1))
    top = len(levels) - 1
    for l, angles in enumerate(levels):
        c = np.cos(angles)
        s = np.sin(angles)
        even = np.stack([c, s], axis=1)
        odd = np.stack([-s, c], axis=1)
        if anomalous_top and l == top and len(angles) > 1:
            odd[1] = (s[1], -c[1])
        children = np.empty((2 * len(vecs), 2 * vecs.shape[1]))
        children[0::2] = np.einsum("pi,pj->pij", vecs, even).reshape(len(vecs), -1)
        children[1::2] = np.einsum("pi,pj->pij", vecs, odd).reshape(len(vecs), -1)
        vecs = children
    return vecs.T


def build_basis_a(schedule: AngleSchedule, uniform_signs: bool = False) -> OrthonormalBasis:
    """A-side family; ``uniform_signs`` drops the pair-1 ``(sin, -cos)`` convention."""
    return OrthonormalBasis(_build(schedule.levels, anomalous_top=not uniform_signs), Side.A)


def build_basis_b(schedule: AngleSchedule) -> OrthonormalBasis:
    return OrthonormalBasis(_build(schedule.levels, anomalous_top=False), Side.B)


def computational_basis(n: int) -> OrthonormalBasis:
    if n < 1:
        raise ValueError("n must be >= 1")
    return OrthonormalBasis(np.eye(2**n), Side.GENERIC)


class NotUnitaryError(ValueError):
    def __init__(self, deviation: float):
        super().__init__(f"matrix is not unitary (max |U U^dag - I| = {deviation:.3g})")
        self.deviation = deviation


def basis_from_columns(matrix: np.ndarray, tol: float = 1e-10, side: Side = Side.GENERIC) -> OrthonormalBasis:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    dev = unitarity_deviation(m)
    if dev > tol:
        raise NotUnitaryError(dev)
    return OrthonormalBasis(m, side)


def coefficients_in_basis(state: np.ndarray, basis: OrthonormalBasis) -> np.ndarray:
    """Entry ``K`` is ``<basis_K|state>``."""
    if state.shape != (basis.matrix.shape[0],):
        raise ValueError(f"state of length {state.shape[0]} does not match a {basis.n}-qubit basis")
    return basis.matrix.conj().T @ state


def gram_deviation(basis: OrthonormalBasis) -> float:
    return float(np.max(np.abs(basis.gram() - np.eye(len(basis)))))


def is_orthonormal(basis: OrthonormalBasis, tol: float = STRUCT_TOL) -> bool:
    return gram_deviation(basis) <= tol
