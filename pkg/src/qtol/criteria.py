"""Success criteria scoring an erroneous final state against the ideal one.

Three criteria are supported: pure-state fidelity, the probability of
measuring a designated correct outcome, and heavy-output probability (mass of
the test state on the basis states whose ideal probability exceeds the median
of the ideal distribution).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from qtol.simulator import StateVector


class WidthMismatch(ValueError):
    """Reference and test states (or outcome string) differ in width."""


@dataclass(frozen=True)
class SuccessCriterion:
    """Tagged success criterion; ``outcome`` is set only for correct-outcome."""

    kind: str  # "fidelity" | "correct_outcome" | "heavy_output"
    outcome: str | None = None

    @classmethod
    def fidelity(cls) -> "SuccessCriterion":
        return cls("fidelity")

    @classmethod
    def correct_outcome(cls, outcome: str) -> "SuccessCriterion":
        if not outcome or any(c not in "01" for c in outcome):
            raise ValueError(f"outcome must be a non-empty bitstring, got {outcome!r}")
        return cls("correct_outcome", outcome)

    @classmethod
    def heavy_output(cls) -> "SuccessCriterion":
        return cls("heavy_output")


def outcome_index(outcome: str, width: int) -> int:
    """Amplitude index of a bitstring written most-significant qubit first."""
    if len(outcome) != width:
        raise WidthMismatch(
            f"outcome {outcome!r} has {len(outcome)} bits, state width is {width}"
        )
    if any(c not in "01" for c in outcome):
        raise ValueError(f"outcome must contain only 0/1, got {outcome!r}")
    return int(outcome, 2)


def _fidelity_amps(ref: np.ndarray, test: np.ndarray) -> float:
    return float(np.abs(np.vdot(ref, test)) ** 2)


def _heavy_mask(ref: np.ndarray) -> np.ndarray:
    # Heavy set: ideal probability strictly greater than the median (the mean
    # of the two middle order statistics, since 2^n is even).  A uniform
    # reference therefore has an empty heavy set.
    probs = np.abs(ref) ** 2
    return probs > np.median(probs)


def fidelity(reference: StateVector, test: StateVector) -> float:
    """Squared overlap |<ref|test>|^2 of two pure states."""
    if reference.width != test.width:
        raise WidthMismatch(
            f"state widths differ: {reference.width} vs {test.width}"
        )
    return _fidelity_amps(reference.amplitudes, test.amplitudes)


def correct_outcome_probability(test: StateVector, outcome: str) -> float:
    """Probability of measuring the given bitstring on the test state."""
    index = outcome_index(outcome, test.width)
    return float(np.abs(test.amplitudes[index]) ** 2)


def heavy_output_probability(reference: StateVector, test: StateVector) -> float:
    """Test-state probability mass on the reference's heavy-output set."""
    if reference.width != test.width:
        raise WidthMismatch(
            f"state widths differ: {reference.width} vs {test.width}"
        )
    mask = _heavy_mask(reference.amplitudes)
    return float(np.sum(np.abs(test.amplitudes[mask]) ** 2))


def evaluate(criterion: SuccessCriterion, reference: StateVector, test: StateVector) -> float:
    """Dispatch to the criterion's scoring function.

    The reference state is unused for correct-outcome (the outcome string
    already fixes the target).
    """
    if criterion.kind == "fidelity":
        return fidelity(reference, test)
    if criterion.kind == "correct_outcome":
        if criterion.outcome is None:
            raise ValueError("correct_outcome criterion is missing its bitstring")
        return correct_outcome_probability(test, criterion.outcome)
    if criterion.kind == "heavy_output":
        return heavy_output_probability(reference, test)
    raise ValueError(f"unknown criterion kind: {criterion.kind!r}")


def make_evaluator(
    criterion: SuccessCriterion, reference: np.ndarray, width: int
) -> Callable[[np.ndarray], float]:
    """Compile a criterion into a fast scorer over raw amplitude arrays.

    Precomputes whatever the criterion derives from the reference (outcome
    index, heavy set) so error sweeps only pay per-state work.
    """
    if criterion.kind == "fidelity":
        ref = reference

        def score(test: np.ndarray) -> float:
            return _fidelity_amps(ref, test)

    elif criterion.kind == "correct_outcome":
        if criterion.outcome is None:
            raise ValueError("correct_outcome criterion is missing its bitstring")
        index = outcome_index(criterion.outcome, width)

        def score(test: np.ndarray) -> float:
            return float(np.abs(test[index]) ** 2)

    elif criterion.kind == "heavy_output":
        mask = _heavy_mask(reference)

        def score(test: np.ndarray) -> float:
            return float(np.sum(np.abs(test[mask]) ** 2))

    else:
        raise ValueError(f"unknown criterion kind: {criterion.kind!r}")
    return score
