"""Pauli error injection: exhaustive single-fault sweeps and Monte Carlo runs.

Fault model: after every gate, each operand qubit independently suffers a
Pauli X, Z, or Y with the configured per-type probabilities (two-qubit gates
therefore carry two fault locations).  The exhaustive sweep simulates every
single-fault experiment once; Monte Carlo samples whole fault trajectories.

Seed-splitting contract (stable, part of the output reproducibility
guarantee): every derived stream is the first 64-bit word of
``numpy.random.SeedSequence((master_seed, *key))``.  Monte Carlo ensemble run
``i`` uses key ``(i,)``; callers that need further sub-streams document their
own keys on top of this rule.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from qtol.circuits import Circuit
from qtol.criteria import SuccessCriterion, make_evaluator
from qtol.simulator import (
    PAULIS,
    StateVector,
    _apply_gate_inplace,
    _apply_pauli_inplace,
    _simulate,
    _zero_amps,
)

#: Cap on the prefix-state cache used by exhaustive sweeps (bytes).
_PREFIX_CACHE_BUDGET = 1 << 28


class InvalidRates(ValueError):
    """Error rates must each lie in [0, 1] with total at most 1."""


@dataclass(frozen=True)
class ErrorRates:
    """Per-gate-qubit probabilities of X, Z, and Y faults."""

    x: float
    z: float
    y: float

    def __post_init__(self) -> None:
        for name, p in (("x", self.x), ("z", self.z), ("y", self.y)):
            if not 0.0 <= p <= 1.0:
                raise InvalidRates(f"rate {name}={p!r} outside [0, 1]")
        if self.total > 1.0:
            raise InvalidRates(f"total rate {self.total!r} exceeds 1")

    @property
    def total(self) -> float:
        return self.x + self.z + self.y

    @classmethod
    def uniform(cls, total: float) -> "ErrorRates":
        """Split a total rate evenly: p/3 per Pauli type."""
        return cls(total / 3.0, total / 3.0, total / 3.0)

    @classmethod
    def zero(cls) -> "ErrorRates":
        return cls(0.0, 0.0, 0.0)


class ErrorInstance(NamedTuple):
    """One specific fault: a Pauli on one operand qubit after one gate."""

    gate_index: int
    qubit: int
    pauli: str


@dataclass(frozen=True)
class ExhaustiveSummary:
    """Single-fault sweep results: reference success and per-Pauli means."""

    reference_success: float
    x_success: float
    z_success: float
    y_success: float
    locations_per_pauli: int

    @property
    def average_single_error(self) -> float:
        """Mean success over the three Pauli types (uniform-rate weighting)."""
        return (self.x_success + self.z_success + self.y_success) / 3.0


def derive_seed(master_seed: int, *key: int) -> int:
    """Deterministic 64-bit sub-seed for stream ``key`` under a master seed."""
    entropy = tuple(int(v) & 0xFFFFFFFFFFFFFFFF for v in (master_seed, *key))
    ss = np.random.SeedSequence(entropy)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def enumerate_single_errors(circuit: Circuit) -> list[ErrorInstance]:
    """All 3*(k+2m) single-fault locations, ordered (gate, operand, X/Z/Y)."""
    instances = []
    for index, gate in enumerate(circuit.gates):
        for qubit in gate.qubits:
            for pauli in PAULIS:
                instances.append(ErrorInstance(index, qubit, pauli))
    return instances


def _single_fault_state(circuit: Circuit, prefix: np.ndarray, instance: ErrorInstance) -> np.ndarray:
    """Finish a run from the state just after the faulted gate."""
    amps = prefix.copy()
    _apply_pauli_inplace(amps, instance.pauli, instance.qubit, circuit.width)
    for gate in circuit.gates[instance.gate_index + 1 :]:
        _apply_gate_inplace(amps, gate, circuit.width)
    return amps


def _sweep_values_block(args) -> list[float]:
    """Worker: score a block of single-fault experiments (full re-simulation)."""
    circuit, criterion, reference, instances = args
    score = make_evaluator(criterion, reference, circuit.width)
    values = []
    for instance in instances:
        amps = _simulate(circuit, {instance.gate_index: [(instance.pauli, instance.qubit)]})
        values.append(score(amps))
    return values


def _sweep_values(
    circuit: Circuit,
    criterion: SuccessCriterion,
    reference: np.ndarray,
    instances: Sequence[ErrorInstance],
    workers: int,
) -> list[float]:
    if workers > 1 and len(instances) > 1:
        blocks = _split_blocks(len(instances), workers)
        args = [(circuit, criterion, reference, instances[lo:hi]) for lo, hi in blocks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_values_block, args))
        return [v for chunk in chunks for v in chunk]

    score = make_evaluator(criterion, reference, circuit.width)
    cache_bytes = (len(circuit.gates) + 1) * reference.nbytes
    if cache_bytes <= _PREFIX_CACHE_BUDGET:
        # Cache the state after each gate once; every fault experiment then
        # replays only the circuit suffix.  Bit-identical to full re-runs.
        amps = _zero_amps(circuit.width)
        prefixes = [amps.copy()]
        for gate in circuit.gates:
            _apply_gate_inplace(amps, gate, circuit.width)
            prefixes.append(amps.copy())
        return [
            score(_single_fault_state(circuit, prefixes[inst.gate_index + 1], inst))
            for inst in instances
        ]
    return _sweep_values_block((circuit, criterion, reference, instances))


def exhaustive_sweep(
    circuit: Circuit, criterion: SuccessCriterion, workers: int = 1
) -> ExhaustiveSummary:
    """Simulate every single Pauli fault once and average per Pauli type.

    The reference success is the criterion evaluated on the noise-free state
    against itself.  Each fault experiment is one run with exactly one
    injection; results do not depend on ``workers``.
    """
    reference = _simulate(circuit)
    score = make_evaluator(criterion, reference, circuit.width)
    reference_success = score(reference)

    instances = enumerate_single_errors(circuit)
    values = _sweep_values(circuit, criterion, reference, instances, workers)

    sums = {p: 0.0 for p in PAULIS}
    counts = {p: 0 for p in PAULIS}
    for instance, value in zip(instances, values):
        sums[instance.pauli] += value
        counts[instance.pauli] += 1

    locations = counts["X"]
    means = {p: (sums[p] / counts[p] if counts[p] else 0.0) for p in PAULIS}
    return ExhaustiveSummary(
        reference_success=reference_success,
        x_success=means["X"],
        z_success=means["Z"],
        y_success=means["Y"],
        locations_per_pauli=locations,
    )


def _mc_amps(circuit: Circuit, rates: ErrorRates, rng: np.random.Generator) -> np.ndarray:
    """One sampled trajectory.  Exactly one uniform draw per gate-qubit, in
    gate then operand order, compared against the X, X+Z, X+Z+Y thresholds."""
    amps = _zero_amps(circuit.width)
    t_x = rates.x
    t_z = rates.x + rates.z
    t_y = rates.x + rates.z + rates.y
    for gate in circuit.gates:
        _apply_gate_inplace(amps, gate, circuit.width)
        for qubit in gate.qubits:
            u = rng.random()
            if u < t_x:
                _apply_pauli_inplace(amps, "X", qubit, circuit.width)
            elif u < t_z:
                _apply_pauli_inplace(amps, "Z", qubit, circuit.width)
            elif u < t_y:
                _apply_pauli_inplace(amps, "Y", qubit, circuit.width)
    return amps


def monte_carlo_run(circuit: Circuit, rates: ErrorRates, seed: int) -> StateVector:
    """One noisy trajectory, deterministic in (circuit, rates, seed)."""
    rng = np.random.default_rng(seed)
    return StateVector(circuit.width, _mc_amps(circuit, rates, rng))


class EnsembleResult(NamedTuple):
    mean: float
    stderr: float


def _ensemble_values_block(args) -> list[float]:
    circuit, rates, criterion, reference, master_seed, start, stop = args
    score = make_evaluator(criterion, reference, circuit.width)
    values = []
    for i in range(start, stop):
        rng = np.random.default_rng(derive_seed(master_seed, i))
        values.append(score(_mc_amps(circuit, rates, rng)))
    return values


def _split_blocks(n: int, workers: int) -> list[tuple[int, int]]:
    chunk = -(-n // workers)
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def monte_carlo_ensemble(
    circuit: Circuit,
    rates: ErrorRates,
    criterion: SuccessCriterion,
    n_runs: int = 1000,
    master_seed: int = 0,
    workers: int = 1,
) -> EnsembleResult:
    """Mean success and standard error over ``n_runs`` sampled trajectories.

    Run ``i`` uses the seed derived from ``(master_seed, i)``, so the result
    is independent of how runs are distributed across workers; values are
    aggregated in run-index order.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    reference = _simulate(circuit)
    if workers > 1 and n_runs > 1:
        blocks = _split_blocks(n_runs, workers)
        args = [
            (circuit, rates, criterion, reference, master_seed, lo, hi)
            for lo, hi in blocks
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_ensemble_values_block, args))
        values = [v for chunk in chunks for v in chunk]
    else:
        values = _ensemble_values_block(
            (circuit, rates, criterion, reference, master_seed, 0, n_runs)
        )

    arr = np.asarray(values)
    mean = float(arr.mean())
    stderr = float(arr.std(ddof=1) / np.sqrt(n_runs)) if n_runs > 1 else 0.0
    return EnsembleResult(mean=mean, stderr=stderr)
