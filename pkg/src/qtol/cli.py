"""Batch front end: build or load circuits, run analyses, write CSV/JSON.

Modes mirror the library queries: ``success`` (probability at a rate),
``tolerable`` (rate at a target, optionally across a width range),
``sweep`` (success across a width range at a fixed rate), ``extrapolate``
(fit measured rates against 1/G and predict), and ``qv`` (mean heavy-output
success over random quantum-volume circuits).

Every record echoes the seed; identical configurations produce byte-identical
output files regardless of worker count.  Exit codes: 0 ok, 1 runtime
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import qtol
from qtol.analysis import (
    NoConvergence,
    Unreachable,
    extrapolate,
    qv_success,
    success_probability,
    tolerable_error_rate,
)
from qtol.circuits import Circuit, circuit_stats
from qtol.criteria import SuccessCriterion
from qtol.generators import (
    FAMILIES,
    BenchmarkSpec,
    InvalidSpec,
    NoSingleOutcome,
    correct_outcome,
    generate,
)
from qtol.noise import ErrorRates, InvalidRates
from qtol.qasm import ParseError, UnsupportedGate, parse
from qtol.simulator import WidthTooLarge, set_memory_budget, zero_state

CSV_COLUMNS = (
    "mode",
    "family",
    "width",
    "G",
    "k",
    "m",
    "rate_or_target",
    "value",
    "stderr",
    "regime",
    "seed",
    "samples",
)

_FAMILY_CRITERIA = {
    "qft": "fidelity",
    "hlf": "fidelity",
    "ryrz": "fidelity",
    "qv": "heavy-output",
    "bv": "correct-outcome",
    "grover": "correct-outcome",
}


class UsageError(Exception):
    """Bad flag values or combinations; mapped to exit code 2."""


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="master seed (echoed in output)")
    parser.add_argument("--runs", type=int, default=1000, help="Monte Carlo runs per estimate")
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker processes (default: all cores); never changes results",
    )
    parser.add_argument(
        "--memory-budget",
        type=int,
        default=None,
        help="state-vector memory cap in bytes (default 2^30, about 26 qubits)",
    )
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--output", default="-", help="output path, '-' for stdout")


def _add_circuit_source(parser: argparse.ArgumentParser, widths: bool) -> None:
    parser.add_argument("--family", choices=FAMILIES, help="benchmark family to generate")
    parser.add_argument("--qasm", help="path of a QASM-subset circuit file")
    parser.add_argument("--width", type=int, help="qubit count for a generated benchmark")
    if widths:
        parser.add_argument(
            "--widths", help="width range 'A:B' (inclusive) or comma list, e.g. 3:8"
        )
    parser.add_argument("--hidden-string", help="BV hidden bitstring (length width-1)")
    parser.add_argument("--marked", type=int, help="Grover marked element (default all-ones)")
    parser.add_argument("--iterations", type=int, help="Grover iterations (default optimal)")
    parser.add_argument("--depth", type=int, default=1, help="RYRZ entangling depth")
    parser.add_argument(
        "--criterion",
        choices=("auto", "fidelity", "correct-outcome", "heavy-output"),
        default="auto",
        help="success criterion (auto picks the family default)",
    )
    parser.add_argument("--outcome", help="correct-outcome bitstring for imported circuits")


def _add_rates(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rate", type=float, help="uniform total Pauli rate (p/3 per type)")
    parser.add_argument(
        "--rates",
        nargs=3,
        type=float,
        metavar=("PX", "PZ", "PY"),
        help="explicit per-type rates",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtol",
        description="Success probability and tolerable Pauli error rate of quantum circuits.",
    )
    parser.add_argument("--version", action="version", version=f"qtol {qtol.__version__}")
    sub = parser.add_subparsers(dest="mode", required=True)

    p = sub.add_parser("success", help="success probability of one circuit at a rate")
    _add_circuit_source(p, widths=False)
    _add_rates(p)
    _add_common(p)

    p = sub.add_parser("tolerable", help="tolerable rate at a target success probability")
    _add_circuit_source(p, widths=True)
    p.add_argument("--target", type=float, required=True, help="target success in (0, 1)")
    _add_common(p)

    p = sub.add_parser("sweep", help="success probability across a width range")
    _add_circuit_source(p, widths=True)
    _add_rates(p)
    _add_common(p)

    p = sub.add_parser("extrapolate", help="fit measured rates against 1/G and predict")
    p.add_argument("--points", help="CSV file with G and value columns (e.g. tolerable output)")
    p.add_argument(
        "--point",
        nargs=2,
        action="append",
        type=float,
        metavar=("G", "RATE"),
        help="inline measurement, repeatable",
    )
    p.add_argument("--gates", type=float, required=True, help="gate count to predict at")
    p.add_argument("--affine", action="store_true", help="fit a/G + b instead of a/G")
    p.add_argument("--family", default="points", help="label recorded in the output")
    _add_common(p)

    p = sub.add_parser("qv", help="mean heavy-output success over random QV circuits")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--circuits", type=int, default=200, help="number of QV circuits")
    _add_rates(p)
    _add_common(p)
    return parser


def _resolve_rates(args) -> ErrorRates:
    if getattr(args, "rates", None) is not None and getattr(args, "rate", None) is not None:
        raise UsageError("give either --rate or --rates, not both")
    try:
        if getattr(args, "rates", None) is not None:
            return ErrorRates(*args.rates)
        if getattr(args, "rate", None) is not None:
            if not 0.0 <= args.rate <= 1.0:
                raise UsageError(f"--rate must be in [0, 1], got {args.rate}")
            return ErrorRates.uniform(args.rate)
    except InvalidRates as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError("an error rate is required (--rate or --rates)")


def _parse_widths(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = text.split(":")
            widths = list(range(int(lo), int(hi) + 1))
        else:
            widths = [int(w) for w in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse --widths {text!r}: use A:B or a comma list") from exc
    if not widths or any(w < 1 for w in widths):
        raise UsageError(f"--widths {text!r} must name widths >= 1")
    return widths


def _target_widths(args) -> list[int]:
    widths_text = getattr(args, "widths", None)
    if widths_text is not None and args.width is not None:
        raise UsageError("give either --width or --widths, not both")
    if widths_text is not None:
        for flag in ("hidden_string", "marked", "iterations"):
            if getattr(args, flag, None) is not None:
                raise UsageError(
                    f"--{flag.replace('_', '-')} only applies to a single --width"
                )
        return _parse_widths(widths_text)
    if args.width is not None:
        if args.width < 1:
            raise UsageError(f"--width must be >= 1, got {args.width}")
        return [args.width]
    raise UsageError("a circuit width is required (--width or --widths)")


def _benchmark_spec(args, width: int) -> BenchmarkSpec:
    hidden = getattr(args, "hidden_string", None)
    if args.family == "bv" and hidden is None:
        hidden = "1" * (width - 1)
    marked = getattr(args, "marked", None)
    if args.family == "grover" and marked is None:
        marked = (1 << width) - 1
    return BenchmarkSpec(
        family=args.family,
        width=width,
        hidden_string=hidden,
        marked=marked,
        iterations=getattr(args, "iterations", None),
        depth=getattr(args, "depth", 1),
    )


def _load_circuit(args, width: int | None) -> tuple[Circuit, str, BenchmarkSpec | None]:
    """Return (circuit, family label, spec or None for file input)."""
    if args.qasm and args.family:
        raise UsageError("give either --family or --qasm, not both")
    if args.qasm:
        path = Path(args.qasm)
        circuit = parse(path.read_text(encoding="utf-8"), name=path.stem)
        return circuit, path.stem, None
    if not args.family:
        raise UsageError("a circuit source is required (--family or --qasm)")
    if width is None:
        raise UsageError("--width is required with --family")
    spec = _benchmark_spec(args, width)
    try:
        circuit = generate(spec, seed=args.seed)
    except InvalidSpec as exc:
        raise UsageError(str(exc)) from exc
    return circuit, args.family, spec


def _resolve_criterion(args, spec: BenchmarkSpec | None) -> SuccessCriterion:
    choice = args.criterion
    if choice == "auto":
        choice = _FAMILY_CRITERIA[spec.family] if spec else (
            "correct-outcome" if args.outcome else "fidelity"
        )
    if choice == "fidelity":
        return SuccessCriterion.fidelity()
    if choice == "heavy-output":
        return SuccessCriterion.heavy_output()
    outcome = args.outcome
    if outcome is None and spec is not None:
        try:
            outcome = correct_outcome(spec)
        except NoSingleOutcome as exc:
            raise UsageError(str(exc)) from exc
    if outcome is None:
        raise UsageError("correct-outcome criterion needs --outcome for imported circuits")
    try:
        return SuccessCriterion.correct_outcome(outcome)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _record(mode, family, circuit, rate_or_target, result, seed) -> dict:
    stats = circuit_stats(circuit)
    return {
        "mode": mode,
        "family": family,
        "width": circuit.width,
        "G": stats.total_gates,
        "k": stats.single_qubit_gates,
        "m": stats.two_qubit_gates,
        "rate_or_target": rate_or_target,
        "value": result.value,
        "stderr": result.stderr,
        "regime": result.regime,
        "seed": seed,
        "samples": result.samples,
    }


def _workers(args) -> int:
    if args.workers is None:
        return os.cpu_count() or 1
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")
    return args.workers


def _check_budget(width: int) -> None:
    # Fail fast before any analysis if the state cannot be allocated.
    zero_state(width)


def _run_success(args) -> list[dict]:
    rates = _resolve_rates(args)
    circuit, family, spec = _load_circuit(args, args.width)
    criterion = _resolve_criterion(args, spec)
    _check_budget(circuit.width)
    result = success_probability(
        circuit, rates, criterion,
        master_seed=args.seed, n_runs=args.runs, workers=_workers(args),
    )
    return [_record("success", family, circuit, rates.total, result, args.seed)]


def _run_sweep(args) -> list[dict]:
    rates = _resolve_rates(args)
    records = []
    for width in _target_widths(args):
        circuit, family, spec = _load_circuit(args, width)
        criterion = _resolve_criterion(args, spec)
        _check_budget(circuit.width)
        result = success_probability(
            circuit, rates, criterion,
            master_seed=args.seed, n_runs=args.runs, workers=_workers(args),
        )
        records.append(_record("sweep", family, circuit, rates.total, result, args.seed))
    return records


def _run_tolerable(args) -> list[dict]:
    if not 0.0 < args.target < 1.0:
        raise UsageError(f"--target must be in (0, 1), got {args.target}")
    records = []
    for width in _target_widths(args):
        circuit, family, spec = _load_circuit(args, width)
        criterion = _resolve_criterion(args, spec)
        _check_budget(circuit.width)
        result = tolerable_error_rate(
            circuit, args.target, criterion,
            master_seed=args.seed, n_runs=args.runs, workers=_workers(args),
        )
        records.append(_record("tolerable", family, circuit, args.target, result, args.seed))
    return records


def _run_extrapolate(args) -> list[dict]:
    points = [tuple(p) for p in (args.point or [])]
    if args.points:
        with open(args.points, newline="", encoding="utf-8") as handle:
            for row in csv.DictReader(handle):
                try:
                    points.append((float(row["G"]), float(row["value"])))
                except (KeyError, ValueError) as exc:
                    raise UsageError(
                        f"{args.points}: rows need numeric G and value columns"
                    ) from exc
    if len(points) < 2:
        raise UsageError("extrapolation needs at least 2 points (--points/--point)")
    try:
        predicted, fit = extrapolate(points, args.gates, affine=args.affine)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return [
        {
            "mode": "extrapolate",
            "family": args.family,
            "width": None,
            "G": args.gates,
            "k": None,
            "m": None,
            "rate_or_target": None,
            "value": predicted,
            "stderr": None,
            "regime": "extrapolation",
            "seed": args.seed,
            "samples": len(points),
        }
    ]


def _run_qv(args) -> list[dict]:
    rates = _resolve_rates(args)
    if args.width < 1:
        raise UsageError(f"--width must be >= 1, got {args.width}")
    if args.circuits < 1:
        raise UsageError(f"--circuits must be >= 1, got {args.circuits}")
    _check_budget(args.width)
    result = qv_success(
        args.width, rates,
        n_circuits=args.circuits, master_seed=args.seed,
        n_runs=args.runs, workers=_workers(args),
    )
    sample = generate(BenchmarkSpec(family="qv", width=args.width), seed=0)
    return [_record("qv", "qv", sample, rates.total, result, args.seed)]


_MODE_RUNNERS = {
    "success": _run_success,
    "sweep": _run_sweep,
    "tolerable": _run_tolerable,
    "extrapolate": _run_extrapolate,
    "qv": _run_qv,
}


def _config_echo(args) -> dict:
    config = {k: v for k, v in vars(args).items() if v is not None}
    config.pop("output", None)
    return config


def render_csv(records: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        writer.writerow(["" if record[c] is None else record[c] for c in CSV_COLUMNS])
    return buffer.getvalue()


def render_json(records: list[dict], config: dict) -> str:
    payload = [
        {**record, "version": qtol.__version__, "config": config} for record in records
    ]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_results(records: list[dict], fmt: str, path: str, config: dict) -> None:
    """Write records as CSV (fixed column order) or JSON (records plus the
    tool version and config echo); byte-stable for identical inputs."""
    if not records:
        raise ValueError("no records to write")
    text = render_csv(records) if fmt == "csv" else render_json(records, config)
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.memory_budget is not None:
            if args.memory_budget < 32:
                raise UsageError(f"--memory-budget {args.memory_budget} is too small")
            set_memory_budget(args.memory_budget)
        records = _MODE_RUNNERS[args.mode](args)
        write_results(records, args.format, args.output, _config_echo(args))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (
        ParseError,
        UnsupportedGate,
        WidthTooLarge,
        Unreachable,
        NoConvergence,
        InvalidSpec,
        InvalidRates,
        NoSingleOutcome,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.output != "-":
        print(f"wrote {len(records)} record(s) to {args.output}", file=sys.stderr)
    return 0


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
