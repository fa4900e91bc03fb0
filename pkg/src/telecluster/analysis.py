"""Structural comparisons: Bell-product witness, phase/permutation matching, n=2 cluster search."""
from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bases import AngleSchedule
from .qcore import inverse_permutation, num_qubits, permute_qubits, purity
from .resource import ResourceState, reduced_last_pair, resource_from_schedules

WITNESS_TOL = 1e-8


class BellVerdict(str, Enum):
    NOT_BELL_PRODUCT = "NOT_BELL_PRODUCT"
    INCONCLUSIVE = "INCONCLUSIVE"


def bell_product_witness(r: ResourceState) -> tuple[float, BellVerdict]:
    """A mixed (A_n, B_n) marginal rules out a product of (A_i, B_i) Bell pairs.

    Purity 1 proves nothing either way, hence INCONCLUSIVE rather than a positive verdict.
    """
    p = purity(reduced_last_pair(r))
    verdict = BellVerdict.NOT_BELL_PRODUCT if p < 1 - WITNESS_TOL else BellVerdict.INCONCLUSIVE
    return p, verdict


@dataclass(frozen=True)
class MatchReport:
    matched: bool
    permutation: tuple[int, ...]
    phase: complex
    fidelity: float
    threshold: float = field(default=1 - 1e-10, compare=False)

    def to_dict(self) -> dict:
        return {
            "matched": self.matched,
            "fidelity": self.fidelity,
            "phase": [self.phase.real, self.phase.imag],
            "permutation": list(self.permutation),
        }


def all_permutations(m: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(m)))


def match_up_to_phase_perm(
    candidate: np.ndarray,
    reference: np.ndarray,
    perms: Iterable[Sequence[int]] | None = None,
    threshold: float = 1 - 1e-10,
) -> MatchReport:
    """Best |<reference| P candidate>|^2 over qubit permutations P.

    ``phase`` is the unit complex number with ``P candidate ~= phase * reference``.
    Ties keep the first permutation in iteration order.
    """
    if candidate.shape != reference.shape:
        raise ValueError(f"size mismatch: {candidate.shape} vs {reference.shape}")
    m = num_qubits(reference)
    perms = [tuple(p) for p in (all_permutations(m) if perms is None else perms)]
    if not perms:
        raise ValueError("permutation set is empty")
    best = None
    for perm in perms:
        ov = complex(np.vdot(reference, permute_qubits(candidate, perm)))
        fid = abs(ov) ** 2
        if best is None or fid > best[0] + 1e-14:
            best = (fid, perm, ov)
    fid, perm, ov = best
    phase = ov / abs(ov) if abs(ov) > 0 else 1 + 0j
    fid = min(fid, 1.0)
    return MatchReport(fid >= threshold, perm, phase, fid, threshold)


def cluster4_reference() -> np.ndarray:
    """(|0000> + |0011> + |1100> - |1111>) / 2."""
    psi = np.zeros(16, dtype=complex)
    psi[[0b0000, 0b0011, 0b1100]] = 0.5
    psi[0b1111] = -0.5
    return psi


def angle_grid(step: float, low: float = 0.0, high: float = math.pi / 2) -> np.ndarray:
    if not step > 0:
        raise ValueError("grid step must be positive")
    count = int(math.floor((high - low) / step + 1e-9)) + 1
    return low + step * np.arange(count)


@dataclass(frozen=True)
class SearchResult:
    schedule_a: AngleSchedule
    schedule_b: AngleSchedule
    report: MatchReport
    evaluated: int


def search_cluster_angles_n2(
    grid_step: float,
    perms: Iterable[Sequence[int]] | None = None,
    reference: np.ndarray | None = None,
    threshold: float = 1 - 1e-6,
    uniform_signs: bool = False,
) -> SearchResult:
    """Grid search of last-level angles (a1, a2, b1, b2) with zero prefixes.

    Grid points run over [0, pi/2] in lexicographic angle order; the first
    strict maximum wins, so equal-fidelity points resolve to the smallest tuple.
    """
    reference = cluster4_reference() if reference is None else reference
    perms = [tuple(p) for p in (all_permutations(4) if perms is None else perms)]
    # <ref| P cand> = <P^-1 ref| cand>
    refs = np.stack([permute_qubits(reference, inverse_permutation(p)) for p in perms]).conj()
    grid = angle_grid(grid_step)
    best = None
    count = 0
    for a1, a2, b1, b2 in itertools.product(grid, repeat=4):
        sa = AngleSchedule.with_last_level((a1, a2))
        sb = AngleSchedule.with_last_level((b1, b2))
        xi = resource_from_schedules(sa, sb, uniform_signs=uniform_signs).state
        ovs = refs @ xi
        fids = np.abs(ovs) ** 2
        k = int(np.argmax(fids))
        count += 1
        if best is None or fids[k] > best[0] + 1e-12:
            best = (float(fids[k]), sa, sb, perms[k], complex(ovs[k]))
    fid, sa, sb, perm, ov = best
    phase = ov / abs(ov) if abs(ov) > 0 else 1 + 0j
    fid = min(fid, 1.0)
    return SearchResult(sa, sb, MatchReport(fid >= threshold, perm, phase, fid, threshold), count)
