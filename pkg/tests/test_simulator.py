"""Simulation kernel: gates, probabilities, sampling, post-selection."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcensemble.seeding import make_rng
from qcensemble.simulator import (
    PostSelectionExhausted,
    RegisterLayout,
    ShotCounts,
    StateVector,
    apply_cswap,
    apply_hadamard,
    apply_mcx,
    dump_amplitudes,
    exact_probabilities,
    init_from_amplitudes,
    post_select,
    sample_shots,
)

INV_SQRT2 = 1.0 / np.sqrt(2.0)


def single_register(n_qubits: int, name: str = "q") -> RegisterLayout:
    return RegisterLayout.from_sizes([(name, n_qubits)])


def random_state(n_qubits: int, rng) -> StateVector:
    amps = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    amps /= np.linalg.norm(amps)
    return init_from_amplitudes(single_register(n_qubits), amps)


class TestRegisterLayout:
    def test_from_sizes_assigns_consecutive_qubits(self):
        layout = RegisterLayout.from_sizes([("a", 1), ("b", 2), ("c", 0)])
        assert layout["a"] == (0,)
        assert layout["b"] == (1, 2)
        assert layout["c"] == ()
        assert layout.n_qubits == 3

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            RegisterLayout({"a": (0, 1), "b": (1,)})

    def test_gap_rejected(self):
        with pytest.raises(ValueError):
            RegisterLayout({"a": (0,), "b": (2,)})


class TestInitFromAmplitudes:
    def test_basis_state(self):
        state = init_from_amplitudes(single_register(1), np.array([1, 0]))
        assert np.allclose(state.amplitudes, [1, 0])

    def test_uniform_superposition(self):
        state = init_from_amplitudes(single_register(1), np.array([INV_SQRT2, INV_SQRT2]))
        assert abs(state.norm() - 1.0) < 1e-12

    def test_renormalizes_and_preserves_ratios(self):
        state = init_from_amplitudes(single_register(1), np.array([0.6, 0.8]))
        assert abs(state.norm() - 1.0) < 1e-15
        probs = exact_probabilities(state, [0])
        assert probs["0"] == pytest.approx(0.36, abs=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            init_from_amplitudes(single_register(2), np.array([1, 0]))

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            init_from_amplitudes(single_register(1), np.array([0.0, 0.0]))

    def test_badly_normalized_rejected(self):
        with pytest.raises(ValueError):
            init_from_amplitudes(single_register(1), np.array([1.0, 1.0]))


class TestHadamard:
    def test_on_zero_gives_plus(self):
        state = init_from_amplitudes(single_register(1), np.array([1, 0]))
        apply_hadamard(state, 0)
        assert np.allclose(state.amplitudes, [INV_SQRT2, INV_SQRT2])

    def test_involution(self):
        state = init_from_amplitudes(single_register(1), np.array([1, 0]))
        apply_hadamard(state, 0)
        apply_hadamard(state, 0)
        assert np.allclose(state.amplitudes, [1, 0], atol=1e-12)

    def test_on_qubit0_of_two_qubit_zero_state(self):
        # Qubit 0 is the least-significant bit, so H spreads |00> over
        # indices 0 and 1.
        state = init_from_amplitudes(single_register(2), np.array([1, 0, 0, 0]))
        apply_hadamard(state, 0)
        assert np.allclose(state.amplitudes, [INV_SQRT2, INV_SQRT2, 0, 0])

    def test_on_qubit1_of_two_qubit_zero_state(self):
        state = init_from_amplitudes(single_register(2), np.array([1, 0, 0, 0]))
        apply_hadamard(state, 1)
        assert np.allclose(state.amplitudes, [INV_SQRT2, 0, INV_SQRT2, 0])

    def test_out_of_range_rejected(self):
        state = init_from_amplitudes(single_register(1), np.array([1, 0]))
        with pytest.raises(ValueError):
            apply_hadamard(state, 1)


class TestMcx:
    def test_plain_x(self):
        state = init_from_amplitudes(single_register(1), np.array([1, 0]))
        apply_mcx(state, [], 0)
        assert np.allclose(state.amplitudes, [0, 1])

    def test_cnot_creates_bell_state(self):
        # (|00> + |01>)/sqrt2 with qubit 0 as control: the qubit-0=1 branch
        # flips the target, producing (|00> + |11>)/sqrt2.
        amps = np.array([INV_SQRT2, INV_SQRT2, 0, 0])
        state = init_from_amplitudes(single_register(2), amps)
        apply_mcx(state, [(0, 1)], 1)
        assert np.allclose(state.amplitudes, [INV_SQRT2, 0, 0, INV_SQRT2])

    def test_toffoli_truth_table(self):
        layout = single_register(3)
        on = np.zeros(8)
        on[3] = 1.0  # controls (qubits 0,1) both set
        state = init_from_amplitudes(layout, on)
        apply_mcx(state, [(0, 1), (1, 1)], 2)
        assert np.argmax(np.abs(state.amplitudes)) == 7

        off = np.zeros(8)
        off[1] = 1.0  # only one control set
        state = init_from_amplitudes(layout, off)
        apply_mcx(state, [(0, 1), (1, 1)], 2)
        assert np.argmax(np.abs(state.amplitudes)) == 1

    def test_control_on_zero_polarity(self):
        state = init_from_amplitudes(single_register(2), np.array([1, 0, 0, 0]))
        apply_mcx(state, [(0, 0)], 1)
        assert np.allclose(state.amplitudes, [0, 0, 1, 0])

    def test_overlapping_indices_rejected(self):
        state = init_from_amplitudes(single_register(2), np.array([1, 0, 0, 0]))
        with pytest.raises(ValueError):
            apply_mcx(state, [(0, 1)], 0)


class TestCswap:
    def test_control_zero_leaves_state_untouched(self):
        rng = make_rng(5)
        state = random_state(3, rng)
        before = state.amplitudes.copy()
        # Zero out the control=1 half so the control is exactly |0>.
        before[((np.arange(8) >> 0) & 1) == 1] = 0
        before /= np.linalg.norm(before)
        state = init_from_amplitudes(single_register(3), before)
        apply_cswap(state, 0, [1], [2])
        assert np.array_equal(state.amplitudes, before / np.linalg.norm(before))

    def test_registers_exchanged_when_control_set(self):
        # control qubit 0 in |1>, reg_a (qubits 1,2) = 0b01, reg_b (3,4) = 0b10
        layout = single_register(5)
        amps = np.zeros(32)
        idx = 1 | (0b01 << 1) | (0b10 << 3)
        amps[idx] = 1.0
        state = init_from_amplitudes(layout, amps)
        apply_cswap(state, 0, [1, 2], [3, 4])
        expected = 1 | (0b10 << 1) | (0b01 << 3)
        assert np.argmax(np.abs(state.amplitudes)) == expected

    def test_length_mismatch_rejected(self):
        state = init_from_amplitudes(single_register(3), np.array([1] + [0] * 7, dtype=float))
        with pytest.raises(ValueError):
            apply_cswap(state, 0, [1], [])

    def test_overlap_rejected(self):
        state = init_from_amplitudes(single_register(3), np.array([1] + [0] * 7, dtype=float))
        with pytest.raises(ValueError):
            apply_cswap(state, 0, [1], [1])


def swap_test_p0(psi: np.ndarray, phi: np.ndarray) -> float:
    """Run the full H-CSWAP-H circuit and return the ancilla-0 probability."""
    k = int(np.log2(psi.size))
    layout = RegisterLayout.from_sizes([("anc", 1), ("a", k), ("b", k)])
    amps = np.kron(np.kron(phi, psi), np.array([1.0, 0.0]))
    state = init_from_amplitudes(layout, amps)
    apply_hadamard(state, 0)
    apply_cswap(state, 0, layout["a"], layout["b"])
    apply_hadamard(state, 0)
    return exact_probabilities(state, [0])["0"]


class TestSwapTestLaw:
    def test_identical_states_give_p0_one(self):
        psi = unit(np.array([0.3, 0.8, 0.5, 0.1]))
        assert swap_test_p0(psi, psi) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_states_give_p0_half(self):
        psi = np.array([1.0, 0.0])
        phi = np.array([0.0, 1.0])
        assert swap_test_p0(psi, phi) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("dim", [2, 4, 8, 16])
    def test_overlap_identity_random_pairs(self, dim):
        rng = make_rng(123 + dim)
        for _ in range(25):
            psi = unit(rng.normal(size=dim))
            phi = unit(rng.normal(size=dim))
            expected = 0.5 + 0.5 * float(np.dot(psi, phi)) ** 2
            assert abs(swap_test_p0(psi, phi) - expected) < 1e-10


def unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


class TestExactProbabilities:
    def test_plus_state(self):
        state = init_from_amplitudes(single_register(1), np.array([INV_SQRT2, INV_SQRT2]))
        probs = exact_probabilities(state, [0])
        assert probs["0"] == pytest.approx(0.5)
        assert probs["1"] == pytest.approx(0.5)

    def test_marginal_of_untouched_qubit(self):
        state = init_from_amplitudes(single_register(2), np.array([1, 0, 0, 0]))
        assert exact_probabilities(state, [1]) == {"0": 1.0, "1": 0.0}

    def test_entries_sum_to_one(self):
        state = random_state(4, make_rng(7))
        probs = exact_probabilities(state, [0, 2, 3])
        assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)

    def test_key_order_follows_measured_list(self):
        # |q1 q0> = |10> is index 2; measuring [1, 0] puts qubit 1 first.
        amps = np.zeros(4)
        amps[2] = 1.0
        state = init_from_amplitudes(single_register(2), amps)
        probs = exact_probabilities(state, [1, 0])
        assert probs["10"] == pytest.approx(1.0)

    def test_empty_measure_list_rejected(self):
        state = init_from_amplitudes(single_register(1), np.array([1, 0]))
        with pytest.raises(ValueError):
            exact_probabilities(state, [])


class TestSampleShots:
    def test_deterministic_state_all_shots_on_one_outcome(self):
        amps = np.array([0.0, 1.0])
        state = init_from_amplitudes(single_register(1), amps)
        counts = sample_shots(state, [0], 8192, seed=0)
        assert counts.counts == {"1": 8192}

    def test_same_seed_same_counts(self):
        state = random_state(3, make_rng(11))
        a = sample_shots(state, [0, 1, 2], 4096, seed=42)
        b = sample_shots(state, [0, 1, 2], 4096, seed=42)
        assert a.counts == b.counts

    def test_different_seeds_differ(self):
        state = init_from_amplitudes(single_register(1), np.array([INV_SQRT2, INV_SQRT2]))
        a = sample_shots(state, [0], 4096, seed=1)
        b = sample_shots(state, [0], 4096, seed=2)
        assert a.counts != b.counts

    def test_counts_sum_to_shots(self):
        state = random_state(4, make_rng(3))
        counts = sample_shots(state, [0, 1], 1000, seed=9)
        assert sum(counts.counts.values()) == 1000

    def test_zero_shots_rejected(self):
        state = init_from_amplitudes(single_register(1), np.array([1, 0]))
        with pytest.raises(ValueError):
            sample_shots(state, [0], 0, seed=0)

    def test_binomial_concentration_at_large_shots(self):
        state = init_from_amplitudes(single_register(1), np.array([INV_SQRT2, INV_SQRT2]))
        shots = 262144
        bound = 4.0 * np.sqrt(0.25 / shots)
        hits = 0
        n_seeds = 100
        for seed in range(n_seeds):
            counts = sample_shots(state, [0], shots, seed=seed)
            if abs(counts.frequency("0") - 0.5) <= bound:
                hits += 1
        assert hits >= 0.99 * n_seeds


class TestPostSelect:
    def test_projects_out_selected_bit(self):
        counts = ShotCounts({"00": 50, "10": 50}, 100)
        kept, p0 = post_select(counts, 0, 0)
        assert kept.counts == {"0": 50}
        assert kept.total_shots == 50
        assert p0 == pytest.approx(0.5)

    def test_all_shots_already_match(self):
        counts = ShotCounts({"01": 30, "00": 70}, 100)
        kept, p0 = post_select(counts, 0, 0)
        assert kept.counts == {"1": 30, "0": 70}
        assert p0 == 1.0

    def test_exhausted_raises(self):
        counts = ShotCounts({"11": 10}, 10)
        with pytest.raises(PostSelectionExhausted):
            post_select(counts, 0, 0)

    def test_empty_counts_rejected(self):
        with pytest.raises(ValueError):
            post_select(ShotCounts({}, 0), 0, 0)


class TestNormAndUnitarityProperties:
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=5))
    @settings(max_examples=60, deadline=None)
    def test_random_gate_sequences_preserve_norm(self, seed, n_qubits):
        rng = make_rng(seed)
        state = random_state(n_qubits, rng)
        for _ in range(12):
            kind = rng.integers(0, 3)
            if kind == 0:
                apply_hadamard(state, int(rng.integers(0, n_qubits)))
            elif kind == 1:
                qubits = list(rng.permutation(n_qubits))
                target = int(qubits.pop())
                n_ctrl = int(rng.integers(0, len(qubits) + 1))
                controls = [(int(q), int(rng.integers(0, 2))) for q in qubits[:n_ctrl]]
                apply_mcx(state, controls, target)
            elif n_qubits >= 3:
                qubits = list(rng.permutation(n_qubits))
                control = int(qubits.pop())
                size = int(rng.integers(1, len(qubits) // 2 + 1))
                apply_cswap(state, control, qubits[:size], qubits[size : 2 * size])
            assert abs(state.norm() - 1.0) < 1e-10

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_self_inverse_gates(self, seed):
        rng = make_rng(seed)
        state = random_state(4, rng)
        before = state.amplitudes.copy()

        apply_hadamard(state, 2)
        apply_hadamard(state, 2)
        assert np.max(np.abs(state.amplitudes - before)) < 1e-12

        apply_mcx(state, [(0, 1)], 3)
        apply_mcx(state, [(0, 1)], 3)
        assert np.max(np.abs(state.amplitudes - before)) < 1e-12

        apply_cswap(state, 0, [1], [3])
        apply_cswap(state, 0, [1], [3])
        assert np.max(np.abs(state.amplitudes - before)) < 1e-12


class TestSamplingUnbiasedness:
    def test_chi_square_goodness_of_fit_over_seeds(self):
        """Sampled frequencies match exact probabilities for a fixed 3-qubit state."""
        state = random_state(3, make_rng(2024))
        measured = [0, 1, 2]
        probs = exact_probabilities(state, measured)
        expected = np.array([probs[k] for k in sorted(probs)])
        shots = 8192
        # chi-square critical value at alpha=0.001 with df=7
        critical = 24.3219
        rejections = 0
        for seed in range(100):
            counts = sample_shots(state, measured, shots, seed=seed)
            observed = np.array([counts.counts.get(k, 0) for k in sorted(probs)])
            stat = np.sum((observed - shots * expected) ** 2 / (shots * expected))
            if stat > critical:
                rejections += 1
        # Expected false rejections at alpha=0.001 over 100 seeds: 0.1
        assert rejections <= 1


class TestDumpAmplitudes:
    def test_round_trip_via_json(self, tmp_path):
        state = init_from_amplitudes(single_register(1), np.array([0.6, 0.8j]))
        path = tmp_path / "amps.json"
        pairs = dump_amplitudes(state, path)
        assert pairs == [[0.6, 0.0], [0.0, 0.8]]
        import json

        assert json.loads(path.read_text()) == pairs
