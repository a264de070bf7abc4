"""Circuit intermediate representation: gate alphabet, circuits, size statistics.

Qubit convention used throughout the package: qubit ``j`` corresponds to bit
``j`` of a basis-state index (little-endian), so basis state ``|q1 q0> = |10>``
is amplitude index 2.  Bitstrings in user-facing APIs are written
most-significant qubit first ("10" means qubit 1 is set).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Max-norm tolerance on ``U^dag U - I`` for explicit-matrix gates.
UNITARITY_TOL = 1e-9

SINGLE_QUBIT_KINDS = frozenset({"h", "x", "y", "z", "s", "t", "rx", "ry", "rz", "u1q"})
TWO_QUBIT_KINDS = frozenset({"cx", "cz", "swap", "u2q"})
ROTATION_KINDS = frozenset({"rx", "ry", "rz"})
MATRIX_KINDS = frozenset({"u1q", "u2q"})
GATE_KINDS = SINGLE_QUBIT_KINDS | TWO_QUBIT_KINDS

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

_FIXED_MATRICES = {
    "h": np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "t": np.array([[1, 0], [0, (1 + 1j) * _INV_SQRT2]], dtype=complex),
    # Two-qubit matrices act on the pair (first listed qubit = high bit of the
    # 2-bit matrix index), so cx = (control, target).
    "cx": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


def _rotation_matrix(kind: str, theta: float) -> np.ndarray:
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "rz":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
    raise ValueError(f"not a rotation kind: {kind!r}")


def _frozen_array(matrix) -> np.ndarray:
    arr = np.array(matrix, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Gate:
    """One gate instance: a kind, the qubits it acts on, and its parameters.

    ``theta`` is set for rx/ry/rz (radians); ``matrix`` is set for the generic
    unitary kinds u1q (2x2) and u2q (4x4).  Instances are immutable values.
    """

    kind: str
    qubits: tuple[int, ...]
    theta: float | None = None
    matrix: np.ndarray | None = None

    # -- factories ---------------------------------------------------------

    @classmethod
    def h(cls, q: int) -> "Gate":
        return cls("h", (q,))

    @classmethod
    def x(cls, q: int) -> "Gate":
        return cls("x", (q,))

    @classmethod
    def y(cls, q: int) -> "Gate":
        return cls("y", (q,))

    @classmethod
    def z(cls, q: int) -> "Gate":
        return cls("z", (q,))

    @classmethod
    def s(cls, q: int) -> "Gate":
        return cls("s", (q,))

    @classmethod
    def t(cls, q: int) -> "Gate":
        return cls("t", (q,))

    @classmethod
    def rx(cls, theta: float, q: int) -> "Gate":
        return cls("rx", (q,), theta=float(theta))

    @classmethod
    def ry(cls, theta: float, q: int) -> "Gate":
        return cls("ry", (q,), theta=float(theta))

    @classmethod
    def rz(cls, theta: float, q: int) -> "Gate":
        return cls("rz", (q,), theta=float(theta))

    @classmethod
    def cx(cls, control: int, target: int) -> "Gate":
        return cls("cx", (control, target))

    @classmethod
    def cz(cls, a: int, b: int) -> "Gate":
        return cls("cz", (a, b))

    @classmethod
    def swap(cls, a: int, b: int) -> "Gate":
        return cls("swap", (a, b))

    @classmethod
    def u1q(cls, matrix, q: int) -> "Gate":
        return cls("u1q", (q,), matrix=_frozen_array(matrix))

    @classmethod
    def u2q(cls, matrix, a: int, b: int) -> "Gate":
        return cls("u2q", (a, b), matrix=_frozen_array(matrix))

    # -- behaviour ---------------------------------------------------------

    def unitary(self) -> np.ndarray:
        """The gate's unitary matrix (2x2 or 4x4, first qubit = high bit)."""
        if self.kind in MATRIX_KINDS:
            if self.matrix is None:
                raise ValueError(f"{self.kind} gate is missing its matrix")
            return self.matrix
        if self.kind in ROTATION_KINDS:
            if self.theta is None:
                raise ValueError(f"{self.kind} gate is missing its angle")
            return _rotation_matrix(self.kind, self.theta)
        try:
            return _FIXED_MATRICES[self.kind]
        except KeyError:
            raise ValueError(f"unknown gate kind: {self.kind!r}") from None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.qubits, self.theta) != (other.kind, other.qubits, other.theta):
            return False
        if self.matrix is None or other.matrix is None:
            return self.matrix is other.matrix
        return np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash((self.kind, self.qubits, self.theta))


@dataclass(frozen=True)
class Circuit:
    """An ordered gate sequence over ``width`` qubits.

    The ``name`` label is carried for reporting and ignored by equality.
    """

    width: int
    gates: tuple[Gate, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class CircuitStats:
    """Gate counts of a circuit plus the derived single-fault location count."""

    single_qubit_gates: int
    two_qubit_gates: int
    total_gates: int
    error_locations: int


def circuit_stats(circuit: Circuit) -> CircuitStats:
    """Count single- and two-qubit gates; error_locations = 3*(k + 2m)."""
    k = sum(1 for g in circuit.gates if len(g.qubits) == 1)
    m = len(circuit.gates) - k
    return CircuitStats(
        single_qubit_gates=k,
        two_qubit_gates=m,
        total_gates=k + m,
        error_locations=3 * (k + 2 * m),
    )


def _validate_gate(index: int, gate: Gate, width: int) -> list[str]:
    problems = []
    prefix = f"gate {index}"
    if gate.kind not in GATE_KINDS:
        problems.append(f"{prefix}: unknown gate kind {gate.kind!r}")
        return problems

    expected_arity = 1 if gate.kind in SINGLE_QUBIT_KINDS else 2
    if len(gate.qubits) != expected_arity:
        problems.append(
            f"{prefix}: {gate.kind} expects {expected_arity} qubit(s), got {len(gate.qubits)}"
        )
        return problems

    for q in gate.qubits:
        if not isinstance(q, (int, np.integer)) or isinstance(q, bool):
            problems.append(f"{prefix}: qubit index {q!r} is not an integer")
        elif q < 0 or q >= width:
            problems.append(f"{prefix}: qubit index {q} out of range for width {width}")
    if expected_arity == 2 and len(set(gate.qubits)) != 2:
        problems.append(f"{prefix}: duplicate qubit index {gate.qubits[0]}")

    if gate.kind in ROTATION_KINDS:
        if gate.theta is None:
            problems.append(f"{prefix}: {gate.kind} requires an angle")
        elif not math.isfinite(gate.theta):
            problems.append(f"{prefix}: angle {gate.theta!r} is not finite")

    if gate.kind in MATRIX_KINDS:
        dim = 2 if gate.kind == "u1q" else 4
        if gate.matrix is None:
            problems.append(f"{prefix}: {gate.kind} requires a matrix")
        elif gate.matrix.shape != (dim, dim):
            problems.append(
                f"{prefix}: {gate.kind} matrix must be {dim}x{dim}, got {gate.matrix.shape}"
            )
        else:
            defect = np.max(np.abs(gate.matrix.conj().T @ gate.matrix - np.eye(dim)))
            if not defect <= UNITARITY_TOL:
                problems.append(f"{prefix}: matrix is not unitary (defect {defect:.3e})")
    return problems


def validate(circuit: Circuit) -> list[str]:
    """Return all invariant violations of a circuit; empty list means valid.

    Violations are returned as data (one message naming the gate index and
    rule per problem) rather than raised, so malformed circuits can be
    inspected.
    """
    problems = []
    if circuit.width < 1:
        problems.append(f"circuit: width must be >= 1, got {circuit.width}")
    for i, gate in enumerate(circuit.gates):
        problems.extend(_validate_gate(i, gate, circuit.width))
    return problems
