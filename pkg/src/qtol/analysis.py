"""Top-level queries: success probability, tolerable error rate, extrapolation.

Regime selection follows the expected fault count E(N) = G * p (total gate
count times total error rate): at most one expected fault uses the exhaustive
single-fault sweep and a closed-form combination; more than one expected
fault falls back to Monte Carlo sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from qtol.circuits import Circuit, circuit_stats
from qtol.criteria import SuccessCriterion
from qtol.generators import BenchmarkSpec, generate
from qtol.noise import (
    ErrorRates,
    ExhaustiveSummary,
    derive_seed,
    exhaustive_sweep,
    monte_carlo_ensemble,
)

REGIME_EXHAUSTIVE = "exhaustive"
REGIME_MONTE_CARLO = "monte_carlo"
REGIME_CLOSED_FORM = "closed_form"
REGIME_SEARCH = "search"

#: Absolute convergence tolerance of the tolerable-rate search.
SEARCH_TOLERANCE = 0.005
#: Cap on Monte Carlo evaluations during the search.
MAX_SEARCH_EVALUATIONS = 60


class Unreachable(Exception):
    """The target success probability exceeds the noise-free success."""


class NoConvergence(Exception):
    """The rate search exhausted its evaluation budget without a match."""

    def __init__(self, message: str, trace: list["SearchPoint"]):
        super().__init__(message)
        self.trace = trace


class SearchPoint(NamedTuple):
    rate: float
    success: float
    stderr: float


@dataclass(frozen=True)
class AnalysisResult:
    """A success probability or tolerable rate plus how it was obtained.

    ``expected_errors`` is E(N) = G * p at the analysed (or returned) rate;
    ``stderr`` and ``samples`` are set for Monte Carlo backed results;
    ``search_trace`` records every (rate, success, stderr) evaluation of a
    rate search.
    """

    value: float
    regime: str
    expected_errors: float
    stderr: float | None = None
    samples: int | None = None
    search_trace: tuple[SearchPoint, ...] | None = None


def single_error_success(
    reference_success: float,
    x_success: float,
    z_success: float,
    y_success: float,
    x_errors: float,
    z_errors: float,
    y_errors: float,
) -> float:
    """Success under at-most-one expected fault.

    Mixes the per-Pauli mean successes weighted by their expected fault
    counts E(N_e), with the remaining weight on the fault-free reference:
    P = sum_e P_e * E(N_e) + P_ref * (1 - sum_e E(N_e)).
    """
    for name, e in (("x", x_errors), ("z", z_errors), ("y", y_errors)):
        if e < 0:
            raise ValueError(f"expected {name} error count must be >= 0, got {e!r}")
    total = x_errors + z_errors + y_errors
    if total > 1.0 + 1e-12:
        raise ValueError(f"single-error model needs sum E(N_e) <= 1, got {total!r}")
    return (
        x_success * x_errors
        + z_success * z_errors
        + y_success * y_errors
        + reference_success * (1.0 - total)
    )


def closed_form_rate(
    target: float,
    reference_success: float,
    x_success: float,
    z_success: float,
    y_success: float,
    gate_count: int,
) -> float:
    """Uniform rate hitting ``target`` in the single-fault model.

    Inverts the single-fault mixture for p/3 = p_x = p_z = p_y:
    p = (1/G) * (target - P_ref) / (mean_e P_e - P_ref).
    """
    if gate_count < 1:
        raise ValueError(f"gate_count must be >= 1, got {gate_count}")
    numerator = target - reference_success
    if numerator == 0.0:
        return 0.0
    denominator = (x_success + z_success + y_success) / 3.0 - reference_success
    return numerator / denominator / gate_count


def _expected_counts(stats_total: int, rates: ErrorRates) -> tuple[float, float, float]:
    return (stats_total * rates.x, stats_total * rates.z, stats_total * rates.y)


def success_probability(
    circuit: Circuit,
    rates: ErrorRates,
    criterion: SuccessCriterion,
    master_seed: int = 0,
    n_runs: int = 1000,
    workers: int = 1,
) -> AnalysisResult:
    """Expected success of running the circuit at the given error rates.

    E(N) = G * (p_x + p_z + p_y) <= 1 uses the exhaustive sweep and the
    closed-form single-fault mixture (deterministic); E(N) > 1 runs a Monte
    Carlo ensemble seeded from ``master_seed``.
    """
    stats = circuit_stats(circuit)
    e_x, e_z, e_y = _expected_counts(stats.total_gates, rates)
    expected = e_x + e_z + e_y

    if expected <= 1.0:
        summary = exhaustive_sweep(circuit, criterion, workers=workers)
        value = single_error_success(
            summary.reference_success,
            summary.x_success,
            summary.z_success,
            summary.y_success,
            e_x,
            e_z,
            e_y,
        )
        return AnalysisResult(value=value, regime=REGIME_EXHAUSTIVE, expected_errors=expected)

    mean, stderr = monte_carlo_ensemble(
        circuit, rates, criterion, n_runs=n_runs, master_seed=master_seed, workers=workers
    )
    return AnalysisResult(
        value=mean,
        regime=REGIME_MONTE_CARLO,
        expected_errors=expected,
        stderr=stderr,
        samples=n_runs,
    )


def tolerable_error_rate(
    circuit: Circuit,
    target: float,
    criterion: SuccessCriterion,
    master_seed: int = 0,
    n_runs: int = 1000,
    workers: int = 1,
    max_evaluations: int = MAX_SEARCH_EVALUATIONS,
    tolerance: float = SEARCH_TOLERANCE,
) -> AnalysisResult:
    """Maximal uniform error rate (p/3 per Pauli) still meeting ``target``.

    If at most one expected fault suffices, the rate comes from the
    closed-form inversion and is strictly below 1/G whenever the target
    exceeds the mean one-fault success.  Otherwise the rate is found by
    bracketing and bisecting Monte Carlo estimates above 1/G until
    |mean - target| <= max(tolerance, 2 * stderr).
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must be in (0, 1), got {target!r}")
    gate_count = circuit_stats(circuit).total_gates
    if gate_count < 1:
        raise ValueError("cannot size an error rate for an empty circuit")

    summary = exhaustive_sweep(circuit, criterion, workers=workers)
    if target > summary.reference_success:
        raise Unreachable(
            f"target {target} exceeds the noise-free success "
            f"{summary.reference_success}"
        )

    one_error_success = summary.average_single_error
    if target >= one_error_success or target == summary.reference_success:
        rate = closed_form_rate(
            target,
            summary.reference_success,
            summary.x_success,
            summary.z_success,
            summary.y_success,
            gate_count,
        )
        assert rate <= 1.0 / gate_count + 1e-15
        if target > one_error_success:
            assert rate < 1.0 / gate_count
        return AnalysisResult(
            value=rate,
            regime=REGIME_CLOSED_FORM,
            expected_errors=gate_count * rate,
        )

    return _search_rate(
        circuit,
        target,
        criterion,
        gate_count,
        master_seed,
        n_runs,
        workers,
        max_evaluations,
        tolerance,
    )


def _search_rate(
    circuit: Circuit,
    target: float,
    criterion: SuccessCriterion,
    gate_count: int,
    master_seed: int,
    n_runs: int,
    workers: int,
    max_evaluations: int,
    tolerance: float,
) -> AnalysisResult:
    """Bracket above 1/G by doubling, then bisect the noisy success curve.

    Evaluation ``j`` runs an ensemble under the sub-seed derived from
    ``(master_seed, j)``, so the search is deterministic in its inputs.
    """
    trace: list[SearchPoint] = []

    def measure(rate: float) -> SearchPoint:
        mean, stderr = monte_carlo_ensemble(
            circuit,
            ErrorRates.uniform(rate),
            criterion,
            n_runs=n_runs,
            master_seed=derive_seed(master_seed, len(trace)),
            workers=workers,
        )
        point = SearchPoint(rate=rate, success=mean, stderr=stderr)
        trace.append(point)
        return point

    def matched(point: SearchPoint) -> bool:
        return abs(point.success - target) <= max(tolerance, 2.0 * point.stderr)

    def result(point: SearchPoint) -> AnalysisResult:
        return AnalysisResult(
            value=point.rate,
            regime=REGIME_SEARCH,
            expected_errors=gate_count * point.rate,
            stderr=point.stderr,
            samples=n_runs,
            search_trace=tuple(trace),
        )

    # The exhaustive estimate says success at 1/G is still above target, so
    # bracket upward from there (rates cannot exceed 1).
    low = 1.0 / gate_count
    high = min(2.0 * low, 1.0)
    while len(trace) < max_evaluations:
        point = measure(high)
        if matched(point):
            return result(point)
        if point.success < target:
            break
        low = high
        if high >= 1.0:
            raise NoConvergence(
                f"success at maximal rate 1.0 is still above target {target}", trace
            )
        high = min(2.0 * high, 1.0)

    while len(trace) < max_evaluations:
        mid = 0.5 * (low + high)
        point = measure(mid)
        if matched(point):
            return result(point)
        if point.success > target:
            low = mid
        else:
            high = mid

    raise NoConvergence(
        f"no rate matched target {target} within {max_evaluations} evaluations", trace
    )


class DegenerateFit(ValueError):
    """All measured points share one gate count; no 1/G trend to fit."""


@dataclass(frozen=True)
class ExtrapolationFit:
    """Least-squares fit of rate = coefficient / G (+ intercept if affine)."""

    coefficient: float
    mse: float
    points: tuple[tuple[float, float], ...]
    intercept: float = 0.0

    def predict(self, gate_count: float) -> float:
        return self.coefficient / gate_count + self.intercept


def extrapolate(
    points: Sequence[tuple[float, float]],
    target_gate_count: float,
    affine: bool = False,
) -> tuple[float, ExtrapolationFit]:
    """Fit measured (gate count, rate) points against 1/G and predict.

    The default model is a single coefficient through the origin in the 1/G
    coordinate; ``affine=True`` adds an intercept for sensitivity checks.
    """
    pts = [(float(g), float(r)) for g, r in points]
    if len(pts) < 2:
        raise ValueError(f"need at least 2 points to fit, got {len(pts)}")
    if any(g <= 0 for g, _ in pts):
        raise ValueError("gate counts must be positive")
    if any(r < 0 for _, r in pts):
        raise ValueError("rates must be non-negative")
    if target_gate_count <= 0:
        raise ValueError(f"target gate count must be positive, got {target_gate_count}")
    gates = np.array([g for g, _ in pts])
    rates = np.array([r for _, r in pts])
    if np.all(gates == gates[0]):
        raise DegenerateFit(f"all points share gate count {gates[0]}")

    x = 1.0 / gates
    if affine:
        coefficient, intercept = np.polyfit(x, rates, 1)
    else:
        coefficient = float(np.dot(x, rates) / np.dot(x, x))
        intercept = 0.0
    fit = ExtrapolationFit(
        coefficient=float(coefficient),
        mse=float(np.mean((rates - (coefficient * x + intercept)) ** 2)),
        points=tuple(pts),
        intercept=float(intercept),
    )
    return fit.predict(target_gate_count), fit


def qv_success(
    width: int,
    rates: ErrorRates,
    n_circuits: int = 200,
    master_seed: int = 0,
    n_runs: int = 1000,
    workers: int = 1,
) -> AnalysisResult:
    """Mean heavy-output success over freshly generated QV circuits.

    Circuit ``i`` is generated from the sub-seed ``(master_seed, i, 0)`` and
    analysed under ``(master_seed, i, 1)``; the reported stderr is taken
    across circuit means.
    """
    if n_circuits < 1:
        raise ValueError(f"n_circuits must be >= 1, got {n_circuits}")
    criterion = SuccessCriterion.heavy_output()
    spec = BenchmarkSpec(family="qv", width=width)

    values = []
    regime = REGIME_EXHAUSTIVE
    expected = 0.0
    for i in range(n_circuits):
        circuit = generate(spec, seed=derive_seed(master_seed, i, 0))
        res = success_probability(
            circuit,
            rates,
            criterion,
            master_seed=derive_seed(master_seed, i, 1),
            n_runs=n_runs,
            workers=workers,
        )
        values.append(res.value)
        regime = res.regime
        expected = res.expected_errors

    arr = np.asarray(values)
    stderr = float(arr.std(ddof=1) / np.sqrt(n_circuits)) if n_circuits > 1 else 0.0
    return AnalysisResult(
        value=float(arr.mean()),
        regime=regime,
        expected_errors=expected,
        stderr=stderr,
        samples=n_circuits,
    )
