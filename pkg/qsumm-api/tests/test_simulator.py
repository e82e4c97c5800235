import math

import numpy as np
import pytest
from core import metrics, simulator
from core.ansatz import Algorithm, AnsatzParams, build_dicke, build_qaoa, build_xy_qaoa
from core.errors import IndexOutOfRange, ParseError, TooManyQubits
from core.problem import DiagonalTerms, bitstring_to_index
from core.simulator import Circuit, Gate, GateKind, NoiseModel, SampleSet, Statevector


def weight_terms(n: int) -> DiagonalTerms:
    return DiagonalTerms(linear=np.ones(n), pairs=np.zeros((n, n)))


def basis_state(n: int, bits: str) -> Statevector:
    amplitudes = np.zeros(1 << n, dtype=complex)
    amplitudes[bitstring_to_index(bits)] = 1.0
    return Statevector(amplitudes)


class TestInitZero:
    def test_one_qubit(self):
        np.testing.assert_array_equal(simulator.init_zero(1).amplitudes, [1.0, 0.0])

    def test_three_qubits(self):
        amplitudes = simulator.init_zero(3).amplitudes
        assert amplitudes.size == 8 and amplitudes[0] == 1.0 and np.count_nonzero(amplitudes) == 1

    def test_too_many_qubits(self):
        with pytest.raises(TooManyQubits):
            simulator.init_zero(25)


class TestApply:
    def test_hadamard(self):
        state = simulator.apply(simulator.init_zero(1), Gate(GateKind.H, (0,)))
        np.testing.assert_allclose(state.amplitudes, [1 / math.sqrt(2)] * 2, atol=1e-12)

    @pytest.mark.parametrize("theta", [0.3, math.pi / 2, 2.0])
    def test_xy_rotation_on_single_excitation(self, theta):
        state = simulator.apply(basis_state(2, "01"), Gate(GateKind.RXXplusYY, (0, 1), theta))
        assert state.amplitudes[bitstring_to_index("01")] == pytest.approx(math.cos(theta), abs=1e-12)
        assert state.amplitudes[bitstring_to_index("10")] == pytest.approx(
            -1j * math.sin(theta), abs=1e-12
        )

    def test_xy_rotation_quarter_turn(self):
        state = simulator.apply(basis_state(2, "01"), Gate(GateKind.RXXplusYY, (0, 1), math.pi / 2))
        expected = np.zeros(4, dtype=complex)
        expected[bitstring_to_index("10")] = -1j
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    @pytest.mark.parametrize("bits", ["000", "101", "011", "111"])
    def test_rzz_is_diagonal(self, bits):
        state = simulator.apply(basis_state(3, bits), Gate(GateKind.RZZ, (0, 2), 0.7))
        np.testing.assert_allclose(state.probabilities(), basis_state(3, bits).probabilities())

    @pytest.mark.parametrize("control, target, before, after", [(0, 1, "10", "11"), (1, 0, "01", "11"), (2, 0, "001", "101")])
    def test_cnot(self, control, target, before, after):
        n = len(before)
        state = simulator.apply(basis_state(n, before), Gate(GateKind.CNOT, (control, target)))
        assert abs(state.amplitudes[bitstring_to_index(after)]) == pytest.approx(1.0)

    def test_out_of_range_qubit(self):
        with pytest.raises(IndexOutOfRange):
            simulator.apply(simulator.init_zero(2), Gate(GateKind.H, (2,)))

    def test_repeated_qubit(self):
        with pytest.raises(IndexOutOfRange):
            simulator.apply(simulator.init_zero(2), Gate(GateKind.CNOT, (1, 1)))

    def test_norm_is_preserved(self):
        rng = np.random.default_rng(2)
        state = simulator.init_zero(5)
        kinds = [GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.H, GateKind.CNOT, GateKind.RZZ, GateKind.RXXplusYY]
        for _ in range(1000):
            kind = kinds[int(rng.integers(len(kinds)))]
            if kind in simulator.ONE_QUBIT:
                qubits = (int(rng.integers(5)),)
            else:
                qubits = tuple(int(q) for q in rng.choice(5, size=2, replace=False))
            angle = float(rng.uniform(0, 2 * math.pi)) if kind in simulator.PARAMETRIC else None
            simulator.apply(state, Gate(kind, qubits, angle))
        assert state.norm() == pytest.approx(1.0, abs=1e-9)


class TestPhaseOperator:
    def test_zero_angle(self):
        state = simulator.apply(simulator.init_zero(2), Gate(GateKind.H, (0,)))
        before = state.amplitudes.copy()
        simulator.apply_phase_operator(state, weight_terms(2), 0.0)
        np.testing.assert_allclose(state.amplitudes, before)

    def test_constant_is_global_phase(self):
        terms = DiagonalTerms(linear=np.zeros(2), pairs=np.zeros((2, 2)), constant=1.3)
        state = Statevector(np.full(4, 0.5, dtype=complex))
        simulator.apply_phase_operator(state, terms, 0.4)
        np.testing.assert_allclose(state.amplitudes, 0.5 * np.exp(-0.4j * 1.3) * np.ones(4))

    def test_weight_at_pi(self):
        state = Statevector(np.full(4, 0.5, dtype=complex))
        simulator.apply_phase_operator(state, weight_terms(2), math.pi)
        np.testing.assert_allclose(state.amplitudes, [0.5, -0.5, -0.5, 0.5], atol=1e-12)

    def test_decomposition_matches_exact_diagonal(self, make_instance):
        instance = make_instance(4, 2, seed=3)
        terms = instance.penalized_terms
        prep = [Gate(GateKind.H, (q,)) for q in range(4)] + [Gate(GateKind.RY, (1,), 0.4)]
        exact = simulator.simulate(Circuit(4, tuple(prep + [Gate(GateKind.PHASE, tuple(range(4)), 0.37, terms)])))
        gates = Circuit(4, tuple(prep + simulator.phase_decomposition(terms, 0.37)))
        decomposed = simulator.simulate(gates)
        overlap = np.vdot(exact.amplitudes, decomposed.amplitudes)
        assert abs(overlap) == pytest.approx(1.0, abs=1e-9)


class TestExpectation:
    def test_basis_state(self, small_instance):
        state = basis_state(5, "10100")
        value = simulator.expectation_diagonal(state, small_instance.raw_terms)
        assert value == pytest.approx(small_instance.raw_terms.evaluate([1, 0, 1, 0, 0]))

    def test_uniform_weight(self):
        state = Statevector(np.full(16, 0.25, dtype=complex))
        assert simulator.expectation_diagonal(state, weight_terms(4)) == pytest.approx(2.0)

    def test_callable_objective(self):
        state = Statevector(np.full(4, 0.5, dtype=complex))
        assert simulator.expectation_diagonal(state, lambda bits: bits.count("1")) == pytest.approx(1.0)

    @pytest.mark.slow
    def test_agrees_with_million_shot_mean(self, make_instance):
        instance = make_instance(8, 3, seed=2)
        params = AnsatzParams(kind=Algorithm.QAOA, p=1, gammas=[0.7], betas=[0.4])
        state = simulator.simulate(build_qaoa(instance, params))
        table = instance.raw_terms.table
        exact = simulator.expectation_diagonal(state, instance.raw_terms)
        shots = 1_000_000
        samples = simulator.sample(state, shots, seed=17)
        mean = sum(table[bitstring_to_index(bits)] * c for bits, c in samples.counts.items()) / shots
        variance = state.probabilities() @ (table - exact) ** 2
        assert abs(mean - exact) < 3 * math.sqrt(variance / shots)


class TestSample:
    def test_basis_state(self):
        samples = simulator.sample(basis_state(3, "110"), 100, seed=1)
        assert samples.counts == {"110": 100}

    def test_bell_state_statistics(self):
        amplitudes = np.zeros(4, dtype=complex)
        amplitudes[0] = amplitudes[3] = 1 / math.sqrt(2)
        samples = simulator.sample(Statevector(amplitudes), 100_000, seed=4)
        assert set(samples.counts) == {"00", "11"}
        sigma = math.sqrt(100_000 * 0.25)
        assert abs(samples.counts["00"] - 50_000) < 5 * sigma

    def test_same_seed_same_samples(self):
        state = simulator.simulate(build_dicke(5, 2))
        assert simulator.sample(state, 500, seed=9) == simulator.sample(state, 500, seed=9)

    def test_sample_set_validation(self):
        with pytest.raises(ValueError):
            SampleSet(n_qubits=2, shots=3, counts={"00": 1})


class TestRunNoisy:
    def test_noiseless_matches_sample(self):
        circuit = build_dicke(5, 2)
        expected = simulator.sample(simulator.simulate(circuit), 300, seed=5)
        assert simulator.run_noisy(circuit, NoiseModel(), 300, seed=5) == expected

    def test_full_readout_scrambling(self):
        circuit = Circuit(3, (Gate(GateKind.RY, (0,), math.pi),))
        samples = simulator.run_noisy(circuit, NoiseModel(p_spam=0.5), 4000, seed=2)
        for q in range(3):
            ones = sum(c for bits, c in samples.counts.items() if bits[q] == "1")
            assert abs(ones / 4000 - 0.5) < 4 * math.sqrt(0.25 / 4000)

    def test_worker_count_does_not_change_result(self):
        circuit = build_dicke(5, 2)
        noise = NoiseModel(p1=0.01, p2=0.05, p_spam=0.01)
        results = [simulator.run_noisy(circuit, noise, 400, seed=8, workers=w) for w in (1, 4, 8)]
        assert results[0] == results[1] == results[2]

    def test_agrees_with_per_trajectory_resimulation(self):
        circuit = build_dicke(4, 2)
        noise = NoiseModel(p1=0.02, p2=0.1, p_spam=0.02)
        gates = circuit.expanded().gates
        outcomes = []
        for t in range(300):
            rng = np.random.default_rng([8, t])
            events = dict(simulator._trajectory_events(gates, noise, rng))
            state = simulator.init_zero(4)
            for pos, gate in enumerate(gates):
                simulator.apply(state, gate)
                if pos in events:
                    simulator.apply_pauli(state, events[pos], gate.qubits)
            cdf = np.cumsum(state.probabilities())
            cdf /= cdf[-1]
            index = min(int(np.searchsorted(cdf, rng.random(), side="right")), 15)
            mask = sum(1 << q for q in np.flatnonzero(rng.random(4) < noise.p_spam))
            outcomes.append(index ^ mask)
        expected = SampleSet.from_indices(4, outcomes)
        assert simulator.run_noisy(circuit, noise, 300, seed=8) == expected

    def test_shared_prefix_applies_each_gate_once(self, monkeypatch):
        gates = tuple(Gate(GateKind.RY, (k % 3,), 0.1 * (k + 1)) for k in range(39))
        circuit = Circuit(3, gates + (Gate(GateKind.CNOT, (0, 1)),))
        applied = []
        original = simulator.apply

        def counting(state, gate):
            applied.append(gate)
            return original(state, gate)

        monkeypatch.setattr(simulator, "apply", counting)
        samples = simulator.run_noisy(circuit, NoiseModel(p2=0.5), 2000, seed=6)
        assert samples.shots == 2000
        assert len(applied) == 40

    def test_single_qubit_depolarizing(self):
        circuit = Circuit(1, (Gate(GateKind.RY, (0,), math.pi),))
        shots = 6000
        samples = simulator.run_noisy(circuit, NoiseModel(p1=1.0), shots, seed=3)
        ones = samples.counts.get("1", 0) / shots
        assert abs(ones - 1 / 3) < 4 * math.sqrt((2 / 9) / shots)

    @pytest.mark.slow
    def test_dicke_under_two_qubit_noise(self):
        shots = 5000
        samples = simulator.run_noisy(build_dicke(6, 3), NoiseModel(p2=3e-3), shots, seed=1)
        icp = sum(c for bits, c in samples.counts.items() if bits.count("1") == 3) / shots
        margin = 3 * math.sqrt(icp * (1 - icp) / shots)
        assert math.comb(6, 3) / 64 < icp - margin
        assert icp + margin < 1.0

    @pytest.mark.slow
    def test_xy_qaoa_under_hardware_noise(self, make_instance):
        instance = make_instance(8, 3, seed=0)
        params = AnsatzParams(kind=Algorithm.XY_QAOA, p=1, gammas=[0.4], betas=[0.3])
        circuit = build_xy_qaoa(instance, params)
        shots = 10_000
        samples = simulator.run_noisy(circuit, NoiseModel.h1(), shots, seed=21)
        icp = metrics.in_constraint_probability(samples, 3)
        margin = 2.576 * math.sqrt(icp * (1 - icp) / shots)
        assert math.comb(8, 3) / 256 < icp - margin
        assert icp + margin < 1.0

    @pytest.mark.slow
    def test_in_constraint_mass_falls_with_two_qubit_error_rate(self, make_instance):
        instance = make_instance(8, 3, seed=0)
        params = AnsatzParams(kind=Algorithm.XY_QAOA, p=1, gammas=[0.4], betas=[0.3])
        circuit = build_xy_qaoa(instance, params)
        masses = []
        for p2 in (0.0, 3e-3, 3e-2):
            noise = NoiseModel(p1=5e-5, p2=p2, p_spam=3e-3)
            samples = simulator.run_noisy(circuit, noise, 10_000, seed=21)
            masses.append(metrics.hamming_distance_distribution(samples, 3).get(0, 0.0))
        assert masses[0] > masses[1] > masses[2]


class TestCircuitDump:
    def test_round_trip(self, small_instance):
        from core.ansatz import AnsatzParams, Algorithm, build_qaoa

        params = AnsatzParams(kind=Algorithm.QAOA, p=1, gammas=[0.3], betas=[0.2])
        circuit = build_qaoa(small_instance, params)
        text = simulator.dump_circuit(circuit)
        parsed = simulator.parse_circuit(text)
        assert simulator.dump_circuit(parsed) == text
        overlap = np.vdot(simulator.simulate(circuit).amplitudes, simulator.simulate(parsed).amplitudes)
        assert abs(overlap) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("line", ["FOO 0", "RX 0", "CNOT 0", "H 0,0.5", "PHASE 0,1,0.2"])
    def test_invalid_lines(self, line):
        with pytest.raises(ParseError):
            simulator.parse_circuit(f"# n_qubits=2\n{line}\n")

    def test_missing_qubit_count(self):
        with pytest.raises(ParseError):
            simulator.parse_circuit("H 0\n")
