import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rwasim.device import TridiagonalHamiltonian
from rwasim.evolution import TransferUnitary, unitary
from rwasim.subcircuits import (
    SubcircuitPair,
    average_fidelity,
    crosstalk,
    decouple_blocks,
    distribution_fidelity,
    effective_reflectivity,
    gate_truth_table,
    leakage,
    post_selected_distribution,
    post_selected_two_mode_unitary,
    truth_table_from_unitary,
    two_mode_unitary,
)


def embed_coupler(eta, pair_lower, n=11, phi=0.0):
    """eta-coupler on (pair_lower, pair_lower+1) inside an identity array."""
    m = np.eye(n, dtype=complex)
    k = pair_lower - 1
    m[k:k + 2, k:k + 2] = two_mode_unitary(eta, phi).matrix
    return TransferUnitary(matrix=m, length=24.0)


class TestTwoModeUnitary:
    def test_eta_one_is_identity(self):
        np.testing.assert_allclose(two_mode_unitary(1.0, 0.0).matrix,
                                   np.eye(2), atol=1e-15)

    def test_eta_zero_is_ix(self):
        np.testing.assert_allclose(two_mode_unitary(0.0, 0.0).matrix,
                                   1j * np.array([[0, 1], [1, 0]]), atol=1e-15)

    def test_half_with_pi_phase(self):
        s = math.sqrt(0.5)
        expected = np.array([[s, 1j * s], [-1j * s, -s]])
        np.testing.assert_allclose(two_mode_unitary(0.5, math.pi).matrix,
                                   expected, atol=1e-12)

    def test_unitary_within_tolerance(self):
        for eta in (0.0, 0.3, 0.9, 1.0):
            m = two_mode_unitary(eta, 1.2).matrix
            np.testing.assert_allclose(m.conj().T @ m, np.eye(2), atol=1e-12)

    def test_reflectivity_plus_transmissivity(self):
        # |u11|^2 + |u21|^2 = 1 (R = 1 - T at the output facet)
        for eta in np.linspace(0, 1, 11):
            m = two_mode_unitary(eta, 0.7).matrix
            assert abs(m[0, 0]) ** 2 + abs(m[1, 0]) ** 2 == pytest.approx(1.0)

    def test_eta_out_of_range(self):
        with pytest.raises(ValueError):
            two_mode_unitary(-0.1, 0.0)


class TestLeakageAndCrosstalk:
    def test_block_decoupled_zero_leakage(self):
        u = embed_coupler(0.3, 1)
        assert leakage(np.abs(u.matrix[:, 0]) ** 2, SubcircuitPair(1)) == \
            pytest.approx(0.0, abs=1e-12)

    def test_uniform_distribution(self):
        p = np.full(11, 1 / 11)
        assert leakage(p, SubcircuitPair(1)) == pytest.approx(100 * 9 / 11)
        assert crosstalk(p, SubcircuitPair(1), SubcircuitPair(8)) == \
            pytest.approx(100 * 2 / 11)

    def test_crosstalk_extremes(self):
        p = np.zeros(11)
        p[7] = 0.6
        p[8] = 0.4
        assert crosstalk(p, SubcircuitPair(1), SubcircuitPair(8)) == \
            pytest.approx(100.0)
        u = embed_coupler(0.5, 1)
        assert crosstalk(np.abs(u.matrix[:, 0]) ** 2, SubcircuitPair(1),
                         SubcircuitPair(8)) == pytest.approx(0.0, abs=1e-12)

    def test_overlapping_pairs_rejected(self):
        p = np.full(11, 1 / 11)
        with pytest.raises(ValueError):
            crosstalk(p, SubcircuitPair(1), SubcircuitPair(2))

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            leakage(np.full(11, 0.2), SubcircuitPair(1))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_leakage_complements_own_power(self, seed):
        rng = np.random.default_rng(seed)
        p = rng.random(11)
        p /= p.sum()
        pair = SubcircuitPair(int(rng.integers(1, 11)))
        own = 100 * (p[pair.lower - 1] + p[pair.lower])
        assert leakage(p, pair) + own == pytest.approx(100.0, abs=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_crosstalk_bounded_by_leakage(self, seed):
        rng = np.random.default_rng(seed)
        p = rng.random(11)
        p /= p.sum()
        assert crosstalk(p, SubcircuitPair(1), SubcircuitPair(8)) <= \
            leakage(p, SubcircuitPair(1)) + 1e-12


class TestDecoupleBlocks:
    def test_zeroing_c23_gives_2_9_blocks(self):
        h = TridiagonalHamiltonian(diag=np.full(11, 3.1),
                                   offdiag=np.full(10, 0.1))
        h2 = decouple_blocks(h, {2})
        assert h2.offdiag[1] == 0.0
        u = unitary(h2, 24.0)
        assert np.max(np.abs(u.matrix[:2, 2:])) <= 1e-12

    def test_three_blocks(self):
        h = TridiagonalHamiltonian(diag=np.full(11, 3.1),
                                   offdiag=np.full(10, 0.1))
        h2 = decouple_blocks(h, {7, 9})
        assert h2.offdiag[6] == 0.0 and h2.offdiag[8] == 0.0
        u = unitary(h2, 24.0).matrix
        assert np.max(np.abs(u[:7, 7:])) <= 1e-12
        assert np.max(np.abs(u[7:9, 9:])) <= 1e-12

    def test_empty_set_is_identity(self):
        h = TridiagonalHamiltonian(diag=np.full(11, 3.1),
                                   offdiag=np.full(10, 0.1))
        h2 = decouple_blocks(h, set())
        np.testing.assert_array_equal(h2.offdiag, h.offdiag)

    def test_out_of_range_boundary(self):
        h = TridiagonalHamiltonian(diag=np.full(11, 3.1),
                                   offdiag=np.full(10, 0.1))
        with pytest.raises(IndexError):
            decouple_blocks(h, {11})


class TestPostSelection:
    def test_block_diagonal_success_probability_one(self):
        u = embed_coupler(0.3, 1)
        sub, success = post_selected_two_mode_unitary(u, SubcircuitPair(1))
        np.testing.assert_allclose(sub.conj().T @ sub, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(success, [1.0, 1.0], atol=1e-12)

    def test_leaky_column_norms(self):
        m = np.eye(11, dtype=complex)
        m[0, 0] = math.sqrt(0.8)  # constructed, not unitary: leaky channel
        u = TransferUnitary(matrix=m, length=1.0)
        _, success = post_selected_two_mode_unitary(u, SubcircuitPair(1))
        assert success[0] == pytest.approx(0.8)
        assert success[1] == pytest.approx(1.0)

    def test_identity_submatrix(self):
        u = TransferUnitary(matrix=np.eye(11, dtype=complex), length=1.0)
        sub, _ = post_selected_two_mode_unitary(u, SubcircuitPair(1))
        np.testing.assert_array_equal(sub, np.eye(2))


class TestEffectiveReflectivity:
    def test_balanced_block(self):
        u = embed_coupler(0.5, 1)
        assert effective_reflectivity(u, SubcircuitPair(1)) == \
            pytest.approx(0.5, abs=1e-12)

    def test_embedded_coupler_recovers_eta(self):
        for eta in (0.2, 0.7, 0.95):
            u = embed_coupler(eta, 8)
            assert effective_reflectivity(u, SubcircuitPair(8)) == \
                pytest.approx(eta, abs=1e-12)

    def test_leaky_matches_renormalized_oracle(self):
        # leaky but ratio-preserving: scale the pair's block by sqrt(0.6)
        base = two_mode_unitary(0.37, 0.4).matrix * math.sqrt(0.6)
        m = np.eye(11, dtype=complex)
        m[:2, :2] = base
        u = TransferUnitary(matrix=m, length=1.0)
        p = np.abs(base) ** 2
        p_renorm = p / p.sum(axis=0, keepdims=True)
        r = math.sqrt((p_renorm[0, 0] * p_renorm[1, 1])
                      / (p_renorm[1, 0] * p_renorm[0, 1]))
        expected = r / (1 + r)
        assert effective_reflectivity(u, SubcircuitPair(1)) == \
            pytest.approx(expected, abs=1e-12)


class TestGateTruthTable:
    def test_identity_gates(self):
        table = gate_truth_table(1.0, 1.0).table
        np.testing.assert_allclose(table, np.eye(4), atol=1e-15)

    def test_hadamard_gates_uniform(self):
        table = gate_truth_table(0.5, 0.5).table
        np.testing.assert_allclose(table, np.full((4, 4), 0.25), atol=1e-15)

    def test_x_on_first_qubit(self):
        table = gate_truth_table(0.0, 1.0).table
        expected_row = np.zeros(4)
        expected_row[2] = 1.0  # |00> -> |10>
        np.testing.assert_allclose(table[0], expected_row, atol=1e-15)

    def test_permutation_rows_iff_extremal_etas(self):
        for eta_a, eta_b in ((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)):
            table = gate_truth_table(eta_a, eta_b).table
            assert np.all(np.isin(table, (0.0, 1.0)))
        table = gate_truth_table(0.5, 1.0).table
        assert not np.all(np.isin(table, (0.0, 1.0)))

    def test_from_unitary_matches_ideal_for_decoupled_device(self):
        m = np.eye(11, dtype=complex)
        m[:2, :2] = two_mode_unitary(0.3, 0.0).matrix
        m[7:9, 7:9] = two_mode_unitary(0.8, 0.0).matrix
        u = TransferUnitary(matrix=m, length=24.0)
        measured = truth_table_from_unitary(u, SubcircuitPair(1),
                                            SubcircuitPair(8))
        ideal = gate_truth_table(0.3, 0.8)
        np.testing.assert_allclose(measured.table, ideal.table, atol=1e-12)

    def test_post_selection_ignores_leakage(self):
        m = np.eye(11, dtype=complex)
        m[:2, :2] = two_mode_unitary(0.3, 0.0).matrix * math.sqrt(0.5)
        m[7:9, 7:9] = two_mode_unitary(0.8, 0.0).matrix
        u = TransferUnitary(matrix=m, length=24.0)
        dist = post_selected_distribution(u, SubcircuitPair(1), 0)
        np.testing.assert_allclose(dist, [0.3, 0.7], atol=1e-12)


class TestDistributionFidelity:
    def test_identical_is_one(self):
        row = np.array([0.1, 0.2, 0.3, 0.4])
        assert distribution_fidelity(row, row) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_is_zero(self):
        a = np.array([0.5, 0.5, 0.0, 0.0])
        b = np.array([0.0, 0.0, 0.5, 0.5])
        assert distribution_fidelity(a, b) == 0.0

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            distribution_fidelity(np.array([0.5, 0.2]), np.array([0.5, 0.5]))

    def test_average_fidelity_identity_vs_xx(self):
        assert average_fidelity(gate_truth_table(1.0, 1.0),
                                gate_truth_table(1.0, 1.0)) == \
            pytest.approx(1.0, abs=1e-12)
        assert average_fidelity(gate_truth_table(1.0, 1.0),
                                gate_truth_table(0.0, 0.0)) == 0.0
