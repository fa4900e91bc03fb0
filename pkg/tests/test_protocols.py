import math

import numpy as np
import pytest

from telecluster.bases import AngleSchedule, build_basis_b
from telecluster.measurement import all_labels, build_pi_basis
from telecluster.protocols import (
    UndecodableError,
    dense_codebook,
    dense_decode,
    dense_encode,
    dense_gram_check,
    dense_round_trip,
    teleport_exhaustive,
    teleport_once,
    transfer_matrix,
    transfer_operator_check,
    verify_decomposition,
)
from telecluster.qcore import apply_on_subsystems, pauli, random_state
from telecluster.resource import cluster6_schedule, computational_resource, resource_from_schedules


def random_resource(n, rng, uniform_signs=False):
    return resource_from_schedules(AngleSchedule.random(n, rng), AngleSchedule.random(n, rng), uniform_signs)


class TestTeleportOnce:
    @pytest.mark.parametrize("seed", range(8))
    def test_bell_case(self, seed):
        rng = np.random.default_rng(seed)
        rec = teleport_once(random_state(1, rng), computational_resource(1), seed)
        assert rec.fidelity >= 1 - 1e-12
        assert rec.correction == rec.outcome
        assert rec.probability == pytest.approx(0.25, abs=1e-12)

    def test_basis_vector_input(self):
        rng = np.random.default_rng(1)
        r = random_resource(3, rng)
        rec = teleport_once(r.basis_b[5], r, 99)
        assert rec.fidelity >= 1 - 1e-10

    def test_cluster6_resource(self):
        rng = np.random.default_rng(2)
        r = resource_from_schedules(*cluster6_schedule(0.2, 0.4, 0.8))
        for seed in range(5):
            assert teleport_once(random_state(3, rng), r, seed).fidelity >= 1 - 1e-10

    def test_reproducible(self):
        rng = np.random.default_rng(3)
        r, phi = random_resource(2, rng), random_state(2, rng)
        assert teleport_once(phi, r, 42).outcome == teleport_once(phi, r, 42).outcome

    def test_bob_pre_is_pauli_image(self):
        rng = np.random.default_rng(4)
        r, phi = random_resource(2, rng), random_state(2, rng)
        rec = teleport_once(phi, r, 7)
        # undoing the correction on bob_post returns bob_pre
        from telecluster.qcore import pauli_string

        np.testing.assert_allclose(pauli_string(rec.outcome) @ phi, rec.bob_pre, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            teleport_once(random_state(2, np.random.default_rng(0)), computational_resource(1), 0)

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            teleport_once(np.array([1.0, 1.0]), computational_resource(1), 0)

    def test_record_serializes(self):
        rec = teleport_once(np.array([1.0, 0.0]), computational_resource(1), 0)
        d = rec.to_dict()
        assert set(d) >= {"outcome", "probability", "bob_pre", "correction", "bob_post", "fidelity"}
        assert d["bob_post"]["num_qubits"] == 1


class TestTeleportExhaustive:
    def test_bell(self):
        recs = teleport_exhaustive(random_state(1, np.random.default_rng(0)), computational_resource(1))
        assert [r.outcome for r in recs] == all_labels(1)
        for rec in recs:
            assert rec.probability == pytest.approx(0.25, abs=1e-12)
            assert rec.fidelity >= 1 - 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_random_schedules(self, n):
        rng = np.random.default_rng(100 + n)
        for _ in range(3 if n < 4 else 1):
            recs = teleport_exhaustive(random_state(n, rng), random_resource(n, rng))
            assert len(recs) == 4**n
            assert max(abs(r.probability - 4.0**-n) for r in recs) <= 1e-10
            assert min(r.fidelity for r in recs) >= 1 - 1e-10

    def test_sign_convention_irrelevant(self):
        rng = np.random.default_rng(5)
        sa, sb, phi = AngleSchedule.random(2, rng), AngleSchedule.random(2, rng), random_state(2, rng)
        faithful = teleport_exhaustive(phi, resource_from_schedules(sa, sb))
        uniform = teleport_exhaustive(phi, resource_from_schedules(sa, sb, uniform_signs=True))
        np.testing.assert_allclose([r.fidelity for r in faithful], [r.fidelity for r in uniform], atol=1e-12)

    def test_complex_prefix_basis(self):
        # arbitrary (complex unitary) bases on both sides
        from telecluster.bases import basis_from_columns
        from telecluster.resource import build_resource

        rng = np.random.default_rng(6)
        bases = []
        for _ in range(2):
            q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
            bases.append(basis_from_columns(q))
        r = build_resource(*bases)
        recs = teleport_exhaustive(random_state(2, rng), r)
        assert min(x.fidelity for x in recs) >= 1 - 1e-10


class TestDecomposition:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_identity_holds(self, n):
        rng = np.random.default_rng(200 + n)
        for _ in range(5):
            assert verify_decomposition(random_state(n, rng), random_resource(n, rng)) <= 1e-10

    def test_bell_case_tight(self):
        assert verify_decomposition(random_state(1, np.random.default_rng(0)), computational_resource(1)) <= 1e-12

    def test_mismatched_basis(self):
        rng = np.random.default_rng(7)
        r = random_resource(2, rng)
        other = build_pi_basis(r.basis_a, build_basis_b(AngleSchedule.random(2, rng)))
        assert verify_decomposition(random_state(2, rng), r, basis=other) > 0.1


class TestTransferOperator:
    def test_computational(self):
        for n in (1, 2, 3):
            assert transfer_operator_check(computational_resource(n)) <= 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_random(self, n):
        rng = np.random.default_rng(300 + n)
        for _ in range(5):
            r = random_resource(n, rng)
            assert transfer_operator_check(r) <= 1e-12
            np.testing.assert_allclose(transfer_matrix(r), np.eye(2**n) / 2**n, atol=1e-12)

    def test_swapped_roles(self):
        r = random_resource(2, np.random.default_rng(8))
        assert transfer_operator_check(r, swap_roles=True) > 1e-3


class TestDenseCoding:
    def test_zero_message(self):
        r = random_resource(2, np.random.default_rng(0))
        np.testing.assert_array_equal(dense_encode(r, [0, 0]), r.state)

    def test_distinct_messages_orthogonal(self):
        r = random_resource(3, np.random.default_rng(1))
        a, b = dense_encode(r, [1, 2, 3]), dense_encode(r, [1, 2, 0])
        assert abs(np.vdot(a, b)) <= 1e-12

    def test_z_on_a1(self):
        r = random_resource(2, np.random.default_rng(2))
        encoded = dense_encode(r, [3, 0])
        # amplitudes with A1 = 1 (upper half of the index range) flip sign
        half = len(r.state) // 2
        np.testing.assert_allclose(encoded[:half], r.state[:half], atol=1e-15)
        np.testing.assert_allclose(encoded[half:], -r.state[half:], atol=1e-15)
        np.testing.assert_allclose(encoded, apply_on_subsystems(pauli(3), [0], r.state), atol=0)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_round_trip_all(self, n):
        rng = np.random.default_rng(400 + n)
        for r in (computational_resource(n), random_resource(n, rng)):
            recs = dense_round_trip(r)
            assert len(recs) == 4**n
            assert all(rec.decoded == rec.message for rec in recs)

    def test_decode_single(self):
        r = random_resource(2, np.random.default_rng(3))
        assert dense_decode(r, r.state) == (0, 0)
        assert dense_decode(r, dense_encode(r, (2, 1))) == (2, 1)

    def test_undecodable(self):
        rng = np.random.default_rng(4)
        r = random_resource(2, rng)
        with pytest.raises(UndecodableError):
            dense_decode(r, random_state(4, rng))

    def test_decode_wrong_size(self):
        with pytest.raises(ValueError):
            dense_decode(computational_resource(2), random_state(3, np.random.default_rng(0)))

    def test_bad_message(self):
        with pytest.raises(ValueError):
            dense_encode(computational_resource(2), [0, 5])

    def test_codebook_rows(self):
        r = random_resource(1, np.random.default_rng(5))
        assert dense_codebook(r).shape == (4, 4)


class TestDenseGram:
    def test_bell(self):
        rep = dense_gram_check(computational_resource(1))
        assert rep.max_offdiag <= 1e-12
        assert rep.ok()

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_random(self, n):
        rep = dense_gram_check(random_resource(n, np.random.default_rng(500 + n)))
        assert rep.max_offdiag <= 1e-10
        assert rep.max_diag_deviation <= 1e-10
        assert rep.max_marginal_deviation <= 1e-12

    def test_marginals_of_random_codewords(self):
        rng = np.random.default_rng(9)
        r = random_resource(3, rng)
        from telecluster.qcore import partial_trace

        for _ in range(10):
            m = tuple(rng.integers(0, 4, 3))
            rho = partial_trace(dense_encode(r, m), [0, 1, 2])
            np.testing.assert_allclose(rho, np.eye(8) / 8, atol=1e-12)


def test_message_bits_per_round():
    r = computational_resource(3)
    recs = dense_round_trip(r, [(3, 2, 1)])
    assert recs[0].to_dict()["bits"] == "111001"
    assert len(recs[0].to_dict()["bits"]) == 2 * 3
    assert math.log2(len(all_labels(3))) == 6
