"""Parametric benchmark circuit families: QFT, BV, Grover, HLF, RYRZ, QV.

Every family is generated deterministically from a (spec, seed) pair.  The
seed only matters for families with random structure (QV blocks and
permutations, RYRZ angles, HLF instances without an explicit matrix).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from qtol.circuits import Circuit, Gate

FAMILIES = ("qft", "bv", "grover", "hlf", "qv", "ryrz")


class InvalidSpec(ValueError):
    """A benchmark spec violates its family's parameter constraints."""


class NoSingleOutcome(ValueError):
    """The family has no single correct measurement outcome."""


@dataclass(frozen=True)
class BenchmarkSpec:
    """Which benchmark to build: family, width, and family-specific knobs.

    hidden_string: BV only, length width-1, most-significant input qubit
        first.  marked/iterations: Grover only (iterations defaults to the
        optimal count).  hlf_matrix: symmetric 0/1 matrix; omitted means a
        random instance drawn from the generation seed.  depth: RYRZ only.
    """

    family: str
    width: int
    hidden_string: str | None = None
    marked: int | None = None
    iterations: int | None = None
    hlf_matrix: tuple[tuple[int, ...], ...] | None = None
    depth: int = 1


def _check_spec(spec: BenchmarkSpec) -> None:
    if spec.family not in FAMILIES:
        raise InvalidSpec(f"unknown family {spec.family!r}; expected one of {FAMILIES}")
    if spec.width < 1:
        raise InvalidSpec(f"width must be >= 1, got {spec.width}")
    if spec.family == "bv":
        s = spec.hidden_string
        if s is None or len(s) != spec.width - 1 or any(c not in "01" for c in s):
            raise InvalidSpec(
                f"bv needs a 0/1 hidden string of length width-1={spec.width - 1}, "
                f"got {s!r}"
            )
    if spec.family == "grover":
        if spec.marked is None or not 0 <= spec.marked < (1 << spec.width):
            raise InvalidSpec(
                f"grover needs a marked element in [0, {1 << spec.width}), got {spec.marked!r}"
            )
        if spec.iterations is not None and spec.iterations < 1:
            raise InvalidSpec(f"grover iterations must be >= 1, got {spec.iterations}")
    if spec.family == "ryrz" and spec.depth < 1:
        raise InvalidSpec(f"ryrz depth must be >= 1, got {spec.depth}")
    if spec.family == "hlf" and spec.hlf_matrix is not None:
        a = np.asarray(spec.hlf_matrix)
        if a.shape != (spec.width, spec.width):
            raise InvalidSpec(f"hlf matrix must be {spec.width}x{spec.width}, got {a.shape}")
        if not np.array_equal(a, a.T) or not np.isin(a, (0, 1)).all():
            raise InvalidSpec("hlf matrix must be symmetric with 0/1 entries")


# -- building blocks ---------------------------------------------------------


def _controlled_phase(theta: float, a: int, b: int) -> list[Gate]:
    """diag(1,1,1,e^{i*theta}) on (a, b), up to global phase."""
    half = theta / 2.0
    return [
        Gate.rz(half, a),
        Gate.rz(half, b),
        Gate.cx(a, b),
        Gate.rz(-half, b),
        Gate.cx(a, b),
    ]


def _phase_flip_all_ones(qubits: list[int]) -> list[Gate]:
    """Flip the sign of |1...1> over the given qubits, up to global phase.

    Realised as a parity network: one Z-string rotation per non-empty qubit
    subset (CX ladder onto the subset's last qubit, rz, ladder undone).
    Gate count grows as 2^len(qubits); intended for small registers.
    """
    n = len(qubits)
    if n == 1:
        return [Gate.rz(math.pi, qubits[0])]
    gates = []
    base = math.pi / (1 << (n - 1))
    for size in range(1, n + 1):
        theta = base if size % 2 == 1 else -base
        for subset in combinations(qubits, size):
            pivot = subset[-1]
            ladder = [Gate.cx(q, pivot) for q in subset[:-1]]
            gates.extend(ladder)
            gates.append(Gate.rz(theta, pivot))
            gates.extend(reversed(ladder))
    return gates


def _haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


# -- families ----------------------------------------------------------------


def qft_circuit(width: int) -> Circuit:
    """Quantum Fourier transform: H / controlled-phase network plus swaps."""
    gates = []
    for i in range(width - 1, -1, -1):
        gates.append(Gate.h(i))
        for j in range(i - 1, -1, -1):
            gates.extend(_controlled_phase(math.pi / (1 << (i - j)), j, i))
    for i in range(width // 2):
        gates.append(Gate.swap(i, width - 1 - i))
    return Circuit(width, gates, name=f"qft-{width}")


def bv_circuit(width: int, hidden_string: str) -> Circuit:
    """Bernstein-Vazirani with a CX oracle.

    Input qubits 0..width-2 (hidden_string[0] tags the highest input qubit),
    ancilla at width-1.  The ancilla is returned to |0>, so the noise-free
    outcome over all qubits is "0" + hidden_string.
    """
    ancilla = width - 1
    gates = [Gate.x(ancilla)]
    gates.extend(Gate.h(q) for q in range(width))
    for q in range(width - 1):
        if hidden_string[width - 2 - q] == "1":
            gates.append(Gate.cx(q, ancilla))
    gates.extend(Gate.h(q) for q in range(width))
    gates.append(Gate.x(ancilla))
    return Circuit(width, gates, name=f"bv-{width}")


def optimal_grover_iterations(width: int) -> int:
    """floor(pi/4 * sqrt(2^n)), at least 1."""
    return max(1, int(math.floor(math.pi / 4.0 * math.sqrt(1 << width))))


def grover_circuit(width: int, marked: int, iterations: int | None = None) -> Circuit:
    """Grover search for one marked element, phase oracle plus diffusion."""
    if iterations is None:
        iterations = optimal_grover_iterations(width)
    qubits = list(range(width))
    flip = _phase_flip_all_ones(qubits)
    oracle_wrap = [Gate.x(q) for q in qubits if not (marked >> q) & 1]

    gates = [Gate.h(q) for q in qubits]
    for _ in range(iterations):
        gates.extend(oracle_wrap)
        gates.extend(flip)
        gates.extend(oracle_wrap)
        gates.extend(Gate.h(q) for q in qubits)
        gates.extend(Gate.x(q) for q in qubits)
        gates.extend(flip)
        gates.extend(Gate.x(q) for q in qubits)
        gates.extend(Gate.h(q) for q in qubits)
    return Circuit(width, gates, name=f"grover-{width}")


def hlf_circuit(width: int, matrix: np.ndarray) -> Circuit:
    """Hidden linear function: H layer, CZ per off-diagonal 1, S per diagonal 1, H layer."""
    gates = [Gate.h(q) for q in range(width)]
    for i in range(width):
        for j in range(i + 1, width):
            if matrix[i][j]:
                gates.append(Gate.cz(i, j))
    for i in range(width):
        if matrix[i][i]:
            gates.append(Gate.s(i))
    gates.extend(Gate.h(q) for q in range(width))
    return Circuit(width, gates, name=f"hlf-{width}")


def ryrz_circuit(width: int, depth: int, rng: np.random.Generator) -> Circuit:
    """Hardware-efficient ansatz: RY+RZ layers with a linear CX entangler."""
    gates = []

    def rotation_layer():
        for q in range(width):
            gates.append(Gate.ry(rng.uniform(0.0, 2.0 * math.pi), q))
        for q in range(width):
            gates.append(Gate.rz(rng.uniform(0.0, 2.0 * math.pi), q))

    rotation_layer()
    for _ in range(depth):
        for q in range(width - 1):
            gates.append(Gate.cx(q, q + 1))
        rotation_layer()
    return Circuit(width, gates, name=f"ryrz-{width}")


def qv_circuit(width: int, rng: np.random.Generator) -> Circuit:
    """Quantum volume model circuit: ``width`` layers of Haar-random two-qubit
    blocks on a fresh random qubit pairing per layer (odd widths idle one
    qubit per layer)."""
    gates = []
    for _ in range(width):
        perm = rng.permutation(width)
        for b in range(width // 2):
            block = _haar_unitary(4, rng)
            gates.append(Gate.u2q(block, int(perm[2 * b]), int(perm[2 * b + 1])))
    return Circuit(width, gates, name=f"qv-{width}")


def _random_hlf_matrix(width: int, rng: np.random.Generator) -> np.ndarray:
    upper = np.triu(rng.integers(0, 2, size=(width, width)))
    return upper | upper.T


def generate(spec: BenchmarkSpec, seed: int = 0) -> Circuit:
    """Build a benchmark circuit; a pure function of (spec, seed)."""
    _check_spec(spec)
    rng = np.random.default_rng(seed)
    if spec.family == "qft":
        return qft_circuit(spec.width)
    if spec.family == "bv":
        return bv_circuit(spec.width, spec.hidden_string)
    if spec.family == "grover":
        return grover_circuit(spec.width, spec.marked, spec.iterations)
    if spec.family == "hlf":
        if spec.hlf_matrix is not None:
            matrix = np.asarray(spec.hlf_matrix)
        else:
            matrix = _random_hlf_matrix(spec.width, rng)
        return hlf_circuit(spec.width, matrix)
    if spec.family == "ryrz":
        return ryrz_circuit(spec.width, spec.depth, rng)
    if spec.family == "qv":
        return qv_circuit(spec.width, rng)
    raise InvalidSpec(f"unknown family {spec.family!r}")


def correct_outcome(spec: BenchmarkSpec) -> str:
    """The single correct measurement outcome, for families that have one.

    BV: "0" + hidden_string (the ancilla ends in |0> at the top bit).
    Grover: the marked element as a width-bit string.  Other families raise
    NoSingleOutcome.
    """
    _check_spec(spec)
    if spec.family == "bv":
        return "0" + spec.hidden_string
    if spec.family == "grover":
        return format(spec.marked, f"0{spec.width}b")
    raise NoSingleOutcome(f"family {spec.family!r} has no single correct outcome")
