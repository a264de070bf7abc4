import math

import numpy as np
import pytest

from qtol.circuits import Circuit, Gate, circuit_stats
from qtol.criteria import SuccessCriterion, evaluate, make_evaluator
from qtol.noise import (
    ErrorInstance,
    ErrorRates,
    InvalidRates,
    derive_seed,
    enumerate_single_errors,
    exhaustive_sweep,
    monte_carlo_ensemble,
    monte_carlo_run,
)
from qtol.simulator import run
from qtol.analysis import single_error_success

from oracles import dense_run, random_circuit

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def bell() -> Circuit:
    return Circuit(2, [Gate.h(0), Gate.cx(0, 1)])


class TestErrorRates:
    def test_uniform_split(self):
        rates = ErrorRates.uniform(0.3)
        assert rates.x == rates.z == rates.y == pytest.approx(0.1, abs=1e-15)
        assert rates.total == pytest.approx(0.3, abs=1e-15)

    def test_rejects_negative(self):
        with pytest.raises(InvalidRates):
            ErrorRates(-0.1, 0.0, 0.0)

    def test_rejects_total_above_one(self):
        with pytest.raises(InvalidRates):
            ErrorRates(0.5, 0.5, 0.5)

    def test_certain_single_pauli_allowed(self):
        assert ErrorRates(1.0, 0.0, 0.0).total == 1.0


class TestEnumeration:
    def test_bell_has_nine_locations(self):
        instances = enumerate_single_errors(bell())
        assert len(instances) == 9
        assert instances[:3] == [
            ErrorInstance(0, 0, "X"),
            ErrorInstance(0, 0, "Z"),
            ErrorInstance(0, 0, "Y"),
        ]
        # two-qubit gate: one location per operand, in operand order
        assert instances[3].qubit == 0 and instances[6].qubit == 1
        assert all(inst.gate_index == 1 for inst in instances[3:])

    def test_single_gate(self):
        assert len(enumerate_single_errors(Circuit(1, [Gate.h(0)]))) == 3

    def test_empty(self):
        assert enumerate_single_errors(Circuit(1, [])) == []

    def test_cardinality_matches_stats(self):
        rng = np.random.default_rng(31)
        for _ in range(40):
            circuit = random_circuit(rng, int(rng.integers(1, 5)), int(rng.integers(0, 25)))
            instances = enumerate_single_errors(circuit)
            assert len(instances) == circuit_stats(circuit).error_locations

    def test_two_qubit_gate_contributes_two_locations_per_pauli(self):
        instances = enumerate_single_errors(Circuit(2, [Gate.cx(0, 1)]))
        for pauli in ("X", "Z", "Y"):
            assert sum(1 for i in instances if i.pauli == pauli) == 2


class TestExhaustiveSweep:
    def test_reference_success_is_one_for_fidelity(self):
        rng = np.random.default_rng(32)
        for _ in range(5):
            circuit = random_circuit(rng, 3, 8)
            summary = exhaustive_sweep(circuit, SuccessCriterion.fidelity())
            assert summary.reference_success == pytest.approx(1.0, abs=1e-9)

    def test_h_gate_z_error_kills_fidelity(self):
        summary = exhaustive_sweep(Circuit(1, [Gate.h(0)]), SuccessCriterion.fidelity())
        assert summary.z_success == pytest.approx(0.0, abs=1e-12)
        assert summary.x_success == pytest.approx(1.0, abs=1e-12)
        assert summary.y_success == pytest.approx(0.0, abs=1e-12)
        assert summary.locations_per_pauli == 1

    def test_x_gate_correct_outcome(self):
        summary = exhaustive_sweep(
            Circuit(1, [Gate.x(0)]), SuccessCriterion.correct_outcome("1")
        )
        assert summary.x_success == pytest.approx(0.0, abs=1e-12)
        assert summary.z_success == pytest.approx(1.0, abs=1e-12)
        assert summary.y_success == pytest.approx(0.0, abs=1e-12)

    def test_means_match_per_instance_runs(self):
        # Independent path: one public run() per instance, averaged by hand.
        rng = np.random.default_rng(33)
        circuit = random_circuit(rng, 3, 10)
        criterion = SuccessCriterion.fidelity()
        reference = run(circuit)
        sums = {"X": 0.0, "Z": 0.0, "Y": 0.0}
        instances = enumerate_single_errors(circuit)
        for inst in instances:
            errored = run(circuit, {inst.gate_index: [(inst.pauli, inst.qubit)]})
            sums[inst.pauli] += evaluate(criterion, reference, errored)
        count = len(instances) // 3
        summary = exhaustive_sweep(circuit, criterion)
        assert summary.locations_per_pauli == count
        assert summary.x_success == pytest.approx(sums["X"] / count, abs=1e-12)
        assert summary.z_success == pytest.approx(sums["Z"] / count, abs=1e-12)
        assert summary.y_success == pytest.approx(sums["Y"] / count, abs=1e-12)

    def test_workers_do_not_change_results(self):
        rng = np.random.default_rng(34)
        circuit = random_circuit(rng, 3, 12)
        a = exhaustive_sweep(circuit, SuccessCriterion.fidelity(), workers=1)
        b = exhaustive_sweep(circuit, SuccessCriterion.fidelity(), workers=3)
        assert a == b

    def test_empty_circuit(self):
        summary = exhaustive_sweep(Circuit(1, []), SuccessCriterion.fidelity())
        assert summary.reference_success == pytest.approx(1.0, abs=1e-12)
        assert summary.locations_per_pauli == 0


class TestMonteCarloRun:
    def test_zero_rates_equal_noise_free(self):
        circuit = bell()
        assert np.array_equal(
            monte_carlo_run(circuit, ErrorRates.zero(), seed=9).amplitudes,
            run(circuit).amplitudes,
        )

    def test_certain_x_after_h(self):
        circuit = Circuit(1, [Gate.h(0)])
        state = monte_carlo_run(circuit, ErrorRates(1.0, 0.0, 0.0), seed=0)
        assert np.allclose(state.amplitudes, [INV_SQRT2, INV_SQRT2], atol=1e-15)
        assert np.allclose(
            state.amplitudes, dense_run(circuit, {0: [("X", 0)]}), atol=1e-12
        )

    def test_deterministic_in_seed(self):
        circuit = bell()
        rates = ErrorRates.uniform(0.4)
        a = monte_carlo_run(circuit, rates, seed=123)
        b = monte_carlo_run(circuit, rates, seed=123)
        assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_seeds_differ(self):
        circuit = bell()
        rates = ErrorRates.uniform(0.9)
        states = {monte_carlo_run(circuit, rates, seed=s).amplitudes.tobytes() for s in range(20)}
        assert len(states) > 1


class TestMonteCarloEnsemble:
    def test_zero_rates(self):
        mean, stderr = monte_carlo_ensemble(
            bell(), ErrorRates.zero(), SuccessCriterion.fidelity(), n_runs=20, master_seed=1
        )
        assert mean == pytest.approx(1.0, abs=1e-9)
        assert stderr == pytest.approx(0.0, abs=1e-12)

    def test_default_runs_is_1000(self):
        import inspect

        sig = inspect.signature(monte_carlo_ensemble)
        assert sig.parameters["n_runs"].default == 1000

    def test_seed_splitting_contract(self):
        # Run i of an ensemble must equal a standalone trajectory seeded from
        # (master_seed, i).
        circuit = bell()
        rates = ErrorRates.uniform(0.5)
        criterion = SuccessCriterion.fidelity()
        reference = run(circuit)
        values = [
            evaluate(criterion, reference, monte_carlo_run(circuit, rates, derive_seed(77, i)))
            for i in range(8)
        ]
        mean, _ = monte_carlo_ensemble(circuit, rates, criterion, n_runs=8, master_seed=77)
        assert mean == pytest.approx(float(np.mean(values)), abs=1e-15)

    def test_workers_do_not_change_result(self):
        circuit = bell()
        rates = ErrorRates.uniform(0.3)
        a = monte_carlo_ensemble(
            circuit, rates, SuccessCriterion.fidelity(), n_runs=64, master_seed=5, workers=1
        )
        b = monte_carlo_ensemble(
            circuit, rates, SuccessCriterion.fidelity(), n_runs=64, master_seed=5, workers=4
        )
        assert a.mean == b.mean and a.stderr == b.stderr

    def test_single_run_has_zero_stderr(self):
        result = monte_carlo_ensemble(
            bell(), ErrorRates.uniform(0.2), SuccessCriterion.fidelity(), n_runs=1, master_seed=3
        )
        assert result.stderr == 0.0


def _exhaustive_prediction(circuit, criterion, total_rate) -> float:
    summary = exhaustive_sweep(circuit, criterion)
    per_type = circuit_stats(circuit).total_gates * total_rate / 3.0
    return single_error_success(
        summary.reference_success,
        summary.x_success,
        summary.z_success,
        summary.y_success,
        per_type,
        per_type,
        per_type,
    )


class TestRegimeConsistency:
    def test_single_qubit_circuits_match_prediction(self):
        # With only single-qubit gates the gate count equals the fault
        # location count, so the single-fault mixture is the true first-order
        # model; at G*p = 0.1 the residual curvature sits inside the noise.
        rng = np.random.default_rng(35)
        circuit = random_circuit(rng, 3, 20, matrix_gates=False)
        circuit = Circuit(3, [g for g in circuit.gates if len(g.qubits) == 1][:12])
        n_gates = len(circuit.gates)
        criterion = SuccessCriterion.fidelity()
        total_rate = 0.1 / n_gates
        prediction = _exhaustive_prediction(circuit, criterion, total_rate)
        for seed in range(5):
            mean, stderr = monte_carlo_ensemble(
                circuit, ErrorRates.uniform(total_rate), criterion,
                n_runs=1000, master_seed=seed,
            )
            assert abs(mean - prediction) <= 3.0 * stderr

    @pytest.mark.xfail(
        reason="the single-fault mixture weights faults by gate count (k+m) while "
        "trajectories sample per gate-qubit (k+2m), a systematic ~0.009 gap on "
        "the Bell circuit at p=0.01 that exceeds the ~0.005 noise band of "
        "10^4 runs; see the model-validity notes in the README",
        strict=False,
    )
    def test_bell_at_p001_with_ten_thousand_runs(self):
        circuit = bell()
        criterion = SuccessCriterion.fidelity()
        prediction = _exhaustive_prediction(circuit, criterion, 0.01)
        for seed in range(5):
            mean, stderr = monte_carlo_ensemble(
                circuit, ErrorRates.uniform(0.01), criterion,
                n_runs=10_000, master_seed=seed,
            )
            assert abs(mean - prediction) <= 3.0 * stderr
