"""qtol: how much Pauli noise can a quantum circuit tolerate?

Given a circuit and a Pauli error rate, compute the expected success
probability of running it; given a target success probability, compute the
maximal tolerable error rate.  Both queries run on an exact state-vector
simulator with exhaustive or Monte Carlo error injection.
"""

from qtol.circuits import Circuit, CircuitStats, Gate, circuit_stats, validate
from qtol.simulator import (
    ProbabilityVector,
    StateVector,
    apply_gate,
    apply_pauli,
    distribution,
    run,
    zero_state,
)
from qtol.criteria import (
    SuccessCriterion,
    correct_outcome_probability,
    evaluate,
    fidelity,
    heavy_output_probability,
)
from qtol.noise import (
    ErrorInstance,
    ErrorRates,
    ExhaustiveSummary,
    derive_seed,
    enumerate_single_errors,
    exhaustive_sweep,
    monte_carlo_ensemble,
    monte_carlo_run,
)
from qtol.generators import BenchmarkSpec, correct_outcome, generate
from qtol.analysis import (
    AnalysisResult,
    ExtrapolationFit,
    extrapolate,
    qv_success,
    success_probability,
    tolerable_error_rate,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult",
    "BenchmarkSpec",
    "Circuit",
    "CircuitStats",
    "ErrorInstance",
    "ErrorRates",
    "ExhaustiveSummary",
    "ExtrapolationFit",
    "Gate",
    "ProbabilityVector",
    "StateVector",
    "SuccessCriterion",
    "__version__",
    "apply_gate",
    "apply_pauli",
    "circuit_stats",
    "correct_outcome",
    "correct_outcome_probability",
    "derive_seed",
    "distribution",
    "enumerate_single_errors",
    "evaluate",
    "exhaustive_sweep",
    "extrapolate",
    "fidelity",
    "generate",
    "heavy_output_probability",
    "monte_carlo_ensemble",
    "monte_carlo_run",
    "qv_success",
    "run",
    "success_probability",
    "tolerable_error_rate",
    "validate",
    "zero_state",
]
