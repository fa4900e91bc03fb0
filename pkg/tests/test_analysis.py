import math
import time

import numpy as np
import pytest

from telecluster.analysis import (
    BellVerdict,
    all_permutations,
    angle_grid,
    bell_product_witness,
    cluster4_reference,
    match_up_to_phase_perm,
    search_cluster_angles_n2,
)
from telecluster.bases import AngleSchedule
from telecluster.qcore import partial_trace, permute_qubits, purity, random_state
from telecluster.resource import (
    bell_product_reference,
    cluster6_reference,
    cluster6_schedule,
    computational_resource,
    resource_from_schedules,
)


class TestWitness:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_computational_inconclusive(self, n):
        p, verdict = bell_product_witness(computational_resource(n))
        assert p == pytest.approx(1, abs=1e-12)
        assert verdict is BellVerdict.INCONCLUSIVE

    def test_cluster6(self):
        p, verdict = bell_product_witness(resource_from_schedules(*cluster6_schedule(0.1, 0.2, 0.3)))
        assert p == pytest.approx(3 / 8, abs=1e-12)
        assert verdict is BellVerdict.NOT_BELL_PRODUCT

    def test_random_schedules(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            r = resource_from_schedules(AngleSchedule.random(3, rng), AngleSchedule.random(3, rng))
            assert bell_product_witness(r)[1] is BellVerdict.NOT_BELL_PRODUCT


class TestMatch:
    def test_self(self):
        psi = random_state(3, np.random.default_rng(1))
        rep = match_up_to_phase_perm(psi, psi, [(0, 1, 2)])
        assert rep.matched
        assert rep.fidelity == pytest.approx(1, abs=1e-12)

    def test_phase_recovered(self):
        psi = random_state(3, np.random.default_rng(2))
        rep = match_up_to_phase_perm(np.exp(1j * math.pi / 3) * psi, psi, [(0, 1, 2)])
        assert rep.matched
        assert rep.phase == pytest.approx(np.exp(1j * math.pi / 3), abs=1e-12)

    def test_permutation_recovered(self):
        psi = random_state(4, np.random.default_rng(3))
        perm = (2, 0, 3, 1)
        scrambled = permute_qubits(psi, perm)
        from telecluster.qcore import inverse_permutation

        rep = match_up_to_phase_perm(scrambled, psi)
        assert rep.matched
        assert rep.permutation == tuple(inverse_permutation(perm))

    def test_cluster6_built_vs_displayed(self):
        # the constrained construction differs from the displayed state in the |101101> sign;
        # over all 720 orderings the best overlap is (6/8)^2
        built = resource_from_schedules(*cluster6_schedule(0.0, 0.0, 0.0)).state
        rep = match_up_to_phase_perm(built, cluster6_reference())
        assert not rep.matched
        assert rep.fidelity == pytest.approx(0.5625, abs=1e-12)
        assert rep.permutation == (0, 1, 2, 3, 4, 5)

    def test_symmetric(self):
        rng = np.random.default_rng(4)
        a, b = random_state(3, rng), random_state(3, rng)
        perms = all_permutations(3)
        assert match_up_to_phase_perm(a, b, perms).fidelity == pytest.approx(
            match_up_to_phase_perm(b, a, perms).fidelity, abs=1e-12
        )

    def test_errors(self):
        with pytest.raises(ValueError):
            match_up_to_phase_perm(random_state(2, np.random.default_rng(0)), random_state(3, np.random.default_rng(0)))
        with pytest.raises(ValueError):
            match_up_to_phase_perm(np.ones(4) / 2, np.ones(4) / 2, [])

    def test_report_json(self):
        psi = np.ones(4) / 2
        d = match_up_to_phase_perm(psi, psi, [(1, 0)]).to_dict()
        assert d == {"matched": True, "fidelity": pytest.approx(1), "phase": [pytest.approx(1), pytest.approx(0)], "permutation": [1, 0]}


class TestClusterSearch:
    def test_reference(self):
        ref = cluster4_reference()
        assert np.linalg.norm(ref) == pytest.approx(1)
        assert ref[0b1111] == -0.5

    def test_grid(self):
        np.testing.assert_allclose(angle_grid(math.pi / 8), np.arange(5) * math.pi / 8)
        assert len(angle_grid(math.pi / 2)) == 2
        with pytest.raises(ValueError):
            angle_grid(0)

    def test_pi_over_8(self):
        res = search_cluster_angles_n2(math.pi / 8)
        assert res.report.fidelity >= 1 - 1e-6
        assert res.report.matched
        assert res.evaluated == 5**4
        # the resource at the found angles reproduces the cluster state after reordering
        xi = resource_from_schedules(res.schedule_a, res.schedule_b).state
        np.testing.assert_allclose(
            permute_qubits(xi, res.report.permutation), res.report.phase * cluster4_reference(), atol=1e-12
        )

    def test_deterministic(self):
        a = search_cluster_angles_n2(math.pi / 4)
        b = search_cluster_angles_n2(math.pi / 4)
        assert (a.schedule_a, a.schedule_b, a.report.permutation) == (b.schedule_a, b.schedule_b, b.report.permutation)

    def test_tie_break_smallest_tuple(self):
        res = search_cluster_angles_n2(math.pi / 8)
        assert res.schedule_a.last_level + res.schedule_b.last_level == (0.0, 0.0, 0.0, 0.0)

    def test_coarse_fast(self):
        t0 = time.perf_counter()
        res = search_cluster_angles_n2(math.pi / 2)
        assert time.perf_counter() - t0 < 1.0
        assert res.evaluated == 16

    def test_bell_product_reference_not_reached(self):
        # purities of the (A2, B2) marginal differ: 1 for Bell pairs, 1/2 for the cluster-like family
        res = search_cluster_angles_n2(math.pi / 8, reference=bell_product_reference(2))
        assert res.report.fidelity == pytest.approx(0.25, abs=1e-12)
        assert purity(partial_trace(bell_product_reference(2), [1, 3])) == pytest.approx(1)
        xi = resource_from_schedules(res.schedule_a, res.schedule_b).state
        assert purity(partial_trace(xi, [1, 3])) == pytest.approx(0.5)
