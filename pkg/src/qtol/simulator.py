"""Exact state-vector simulation: gate application and Pauli fault injection.

All kernels operate on flat arrays of 2^n complex128 amplitudes, with qubit j
mapped to bit j of the amplitude index.  Public operations are value-in /
value-out; returned state vectors are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from qtol.circuits import Circuit, Gate

#: Default cap on amplitude storage per state vector: 1 GiB = 2^26 amplitudes.
DEFAULT_MEMORY_BUDGET = 1 << 30

_BYTES_PER_AMPLITUDE = 16

_memory_budget = DEFAULT_MEMORY_BUDGET

PAULIS = ("X", "Z", "Y")


def set_memory_budget(n_bytes: int) -> None:
    """Set the process-wide amplitude-storage cap (bytes)."""
    global _memory_budget
    if n_bytes < _BYTES_PER_AMPLITUDE * 2:
        raise ValueError(f"memory budget {n_bytes} cannot hold any state")
    _memory_budget = int(n_bytes)


def get_memory_budget() -> int:
    return _memory_budget


class WidthTooLarge(ValueError):
    """The requested state vector exceeds the configured memory budget."""


class QubitOutOfRange(ValueError):
    """A gate or fault addresses a qubit outside the state's width."""


class InvalidInjection(ValueError):
    """A fault injection names a bad gate index, qubit, or Pauli."""


@dataclass(frozen=True)
class StateVector:
    """2^width complex amplitudes of a pure n-qubit state (norm 1 within 1e-9)."""

    width: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        if self.width < 1:
            raise ValueError(f"width must be >= 1, got {self.width}")
        if amps.shape != (1 << self.width,):
            raise ValueError(
                f"expected {1 << self.width} amplitudes for width {self.width}, "
                f"got shape {amps.shape}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class ProbabilityVector:
    """Measurement distribution over the 2^n basis states."""

    probabilities: np.ndarray

    def __post_init__(self) -> None:
        probs = np.array(self.probabilities, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probabilities must be a non-empty 1-D array")
        if np.any(probs < 0) or abs(float(probs.sum()) - 1.0) > 1e-9:
            raise ValueError("probabilities must be non-negative and sum to 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)


def zero_state(width: int, memory_budget: int | None = None) -> StateVector:
    """The all-zeros computational basis state |0...0> on ``width`` qubits."""
    amps = _zero_amps(width, memory_budget)
    return StateVector(width, amps)


def _zero_amps(width: int, memory_budget: int | None = None) -> np.ndarray:
    budget = _memory_budget if memory_budget is None else memory_budget
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    needed = _BYTES_PER_AMPLITUDE << width
    if needed > budget:
        raise WidthTooLarge(
            f"width {width} needs {needed} bytes of amplitudes, "
            f"budget is {budget}"
        )
    amps = np.zeros(1 << width, dtype=complex)
    amps[0] = 1.0
    return amps


# -- index helpers (cached per shape; arrays are shared read-only) ----------


@lru_cache(maxsize=1024)
def _pair_indices(n_amps: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    step = 1 << q
    base = np.arange(0, n_amps, step << 1)
    i0 = (base[:, None] + np.arange(step)[None, :]).ravel()
    i1 = i0 + step
    i0.setflags(write=False)
    i1.setflags(write=False)
    return i0, i1


@lru_cache(maxsize=1024)
def _quad_indices(n_amps: int, a: int, b: int) -> tuple[np.ndarray, ...]:
    idx = np.arange(n_amps)
    base = idx[((idx >> a) & 1 == 0) & ((idx >> b) & 1 == 0)]
    i00 = base
    i01 = base | (1 << b)
    i10 = base | (1 << a)
    i11 = i10 | (1 << b)
    for arr in (i00, i01, i10, i11):
        arr.setflags(write=False)
    return i00, i01, i10, i11


# -- in-place kernels --------------------------------------------------------


def _check_qubits(gate_qubits: Sequence[int], width: int) -> None:
    for q in gate_qubits:
        if not 0 <= q < width:
            raise QubitOutOfRange(f"qubit {q} out of range for width {width}")
    if len(set(gate_qubits)) != len(gate_qubits):
        raise ValueError(f"duplicate qubit in gate operands {tuple(gate_qubits)}")


def _apply_1q_inplace(amps: np.ndarray, u: np.ndarray, q: int) -> None:
    i0, i1 = _pair_indices(amps.size, q)
    a = amps[i0]
    b = amps[i1]
    amps[i0] = u[0, 0] * a + u[0, 1] * b
    amps[i1] = u[1, 0] * a + u[1, 1] * b


def _apply_2q_inplace(amps: np.ndarray, u: np.ndarray, qa: int, qb: int) -> None:
    # Matrix index of the pair is (bit(qa) << 1) | bit(qb).
    i00, i01, i10, i11 = _quad_indices(amps.size, qa, qb)
    v = np.stack([amps[i00], amps[i01], amps[i10], amps[i11]])
    w = u @ v
    amps[i00] = w[0]
    amps[i01] = w[1]
    amps[i10] = w[2]
    amps[i11] = w[3]


def _apply_gate_inplace(amps: np.ndarray, gate: Gate, width: int) -> None:
    _check_qubits(gate.qubits, width)
    u = gate.unitary()
    if len(gate.qubits) == 1:
        _apply_1q_inplace(amps, u, gate.qubits[0])
    else:
        _apply_2q_inplace(amps, u, gate.qubits[0], gate.qubits[1])


def _apply_pauli_inplace(amps: np.ndarray, pauli: str, q: int, width: int) -> None:
    # Specialised so X/Z/Y act exactly (swaps and sign/i factors, no rounding).
    if not 0 <= q < width:
        raise QubitOutOfRange(f"qubit {q} out of range for width {width}")
    i0, i1 = _pair_indices(amps.size, q)
    if pauli == "X":
        a = amps[i0]
        amps[i0] = amps[i1]
        amps[i1] = a
    elif pauli == "Z":
        amps[i1] = -amps[i1]
    elif pauli == "Y":
        a = amps[i0]
        amps[i0] = -1j * amps[i1]
        amps[i1] = 1j * a
    else:
        raise ValueError(f"pauli must be one of {PAULIS}, got {pauli!r}")


# -- public operations -------------------------------------------------------


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return the state transformed by one gate; the input is left untouched."""
    amps = state.amplitudes.copy()
    _apply_gate_inplace(amps, gate, state.width)
    return StateVector(state.width, amps)


def apply_pauli(state: StateVector, pauli: str, qubit: int) -> StateVector:
    """Apply a single Pauli X, Z, or Y to one qubit.

    X swaps the target qubit's amplitude pairs (a0, a1) -> (a1, a0),
    Z maps them to (a0, -a1), and Y to (-i*a1, i*a0).
    """
    amps = state.amplitudes.copy()
    _apply_pauli_inplace(amps, pauli, qubit, state.width)
    return StateVector(state.width, amps)


Injections = Mapping[int, Sequence[tuple[str, int]]]


def _check_injections(circuit: Circuit, injections: Injections) -> None:
    n_gates = len(circuit.gates)
    for index, faults in injections.items():
        if not isinstance(index, (int, np.integer)) or not 0 <= index < n_gates:
            raise InvalidInjection(
                f"injection index {index!r} outside circuit of {n_gates} gates"
            )
        operands = circuit.gates[index].qubits
        for pauli, qubit in faults:
            if pauli not in PAULIS:
                raise InvalidInjection(f"unknown pauli {pauli!r} at gate {index}")
            if qubit not in operands:
                raise InvalidInjection(
                    f"injection qubit {qubit} is not an operand of gate {index} "
                    f"(operands {operands})"
                )


def _simulate(
    circuit: Circuit,
    injections: Injections | None = None,
    memory_budget: int | None = None,
) -> np.ndarray:
    """Raw-array core of :func:`run`; returns a fresh writable buffer."""
    amps = _zero_amps(circuit.width, memory_budget)
    if not injections:
        for gate in circuit.gates:
            _apply_gate_inplace(amps, gate, circuit.width)
        return amps
    for i, gate in enumerate(circuit.gates):
        _apply_gate_inplace(amps, gate, circuit.width)
        for pauli, qubit in injections.get(i, ()):
            _apply_pauli_inplace(amps, pauli, qubit, circuit.width)
    return amps


def run(
    circuit: Circuit,
    injections: Injections | None = None,
    memory_budget: int | None = None,
) -> StateVector:
    """Simulate a circuit from |0...0>, optionally injecting Pauli faults.

    ``injections`` maps a gate index to the faults applied immediately after
    that gate, each a ``(pauli, qubit)`` pair on one of the gate's operands.
    """
    if injections:
        _check_injections(circuit, injections)
    amps = _simulate(circuit, injections, memory_budget)
    return StateVector(circuit.width, amps)


def distribution(state: StateVector) -> ProbabilityVector:
    """Measurement probabilities |amp_k|^2 of every basis state."""
    return ProbabilityVector(np.abs(state.amplitudes) ** 2)
