import csv
import json
import math

import pytest

from qtol import __version__
from qtol.analysis import success_probability, tolerable_error_rate
from qtol.cli import CSV_COLUMNS, main
from qtol.criteria import SuccessCriterion
from qtol.generators import BenchmarkSpec, generate
from qtol.noise import ErrorRates


def run_cli(*args) -> int:
    return main(list(args))


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


class TestSuccessMode:
    def test_json_record_matches_library(self, tmp_path):
        out = tmp_path / "r.json"
        code = run_cli(
            "success", "--family", "qft", "--width", "4", "--rate", "0.0015",
            "--criterion", "fidelity", "--seed", "7", "--format", "json",
            "--output", str(out), "--workers", "1",
        )
        assert code == 0
        records = json.loads(out.read_text())
        assert len(records) == 1
        record = records[0]
        expected = success_probability(
            generate(BenchmarkSpec("qft", 4), seed=7),
            ErrorRates.uniform(0.0015),
            SuccessCriterion.fidelity(),
            master_seed=7,
        )
        assert record["value"] == expected.value
        assert record["regime"] == "exhaustive"
        assert record["seed"] == 7
        assert record["version"] == __version__
        assert record["config"]["rate"] == 0.0015
        assert set(CSV_COLUMNS) <= set(record)

    def test_csv_columns_fixed_order(self, tmp_path):
        out = tmp_path / "r.csv"
        assert run_cli(
            "success", "--family", "bv", "--width", "4", "--hidden-string", "101",
            "--rate", "0.001", "--seed", "1", "--output", str(out), "--workers", "1",
        ) == 0
        header = out.read_text().splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)
        row = read_csv(out)[0]
        assert row["mode"] == "success"
        assert row["family"] == "bv"
        assert (row["G"], row["k"], row["m"]) == ("15", "12", "3")

    def test_explicit_per_type_rates(self, tmp_path):
        out = tmp_path / "r.csv"
        assert run_cli(
            "success", "--family", "qft", "--width", "3",
            "--rates", "0.001", "0.002", "0.003",
            "--output", str(out), "--workers", "1",
        ) == 0
        assert read_csv(out)[0]["rate_or_target"] == repr(0.001 + 0.002 + 0.003)


class TestTolerableMode:
    def test_single_width(self, tmp_path):
        out = tmp_path / "r.csv"
        assert run_cli(
            "tolerable", "--family", "bv", "--width", "6", "--hidden-string", "10101",
            "--target", "0.66", "--criterion", "correct-outcome", "--seed", "1",
            "--output", str(out), "--workers", "1",
        ) == 0
        row = read_csv(out)[0]
        expected = tolerable_error_rate(
            generate(BenchmarkSpec("bv", 6, hidden_string="10101"), seed=1),
            0.66,
            SuccessCriterion.correct_outcome("010101"),
            master_seed=1,
        )
        assert float(row["value"]) == expected.value
        assert row["regime"] == "closed_form"
        assert float(row["value"]) < 1.0 / float(row["G"])

    def test_width_range_fig5_shape(self, tmp_path):
        out = tmp_path / "r.csv"
        assert run_cli(
            "tolerable", "--family", "qft", "--widths", "3:5", "--target", "0.66",
            "--seed", "2", "--output", str(out), "--workers", "1",
        ) == 0
        rows = read_csv(out)
        assert [r["width"] for r in rows] == ["3", "4", "5"]
        gates = [float(r["G"]) for r in rows]
        assert gates == sorted(gates)


class TestSweepMode:
    def test_success_across_widths(self, tmp_path):
        out = tmp_path / "r.csv"
        assert run_cli(
            "sweep", "--family", "qft", "--widths", "3,5", "--rate", "0.0015",
            "--seed", "3", "--output", str(out), "--workers", "1",
        ) == 0
        rows = read_csv(out)
        assert [r["width"] for r in rows] == ["3", "5"]
        assert all(r["mode"] == "sweep" for r in rows)


class TestExtrapolateMode:
    def test_inline_points(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_cli(
            "extrapolate", "--point", "100", "0.01", "--point", "200", "0.005",
            "--point", "400", "0.0025", "--gates", "1000",
            "--format", "json", "--output", str(out),
        ) == 0
        record = json.loads(out.read_text())[0]
        assert record["value"] == pytest.approx(0.001, abs=1e-12)
        assert record["samples"] == 3
        assert record["regime"] == "extrapolation"

    def test_points_file_from_tolerable_output(self, tmp_path):
        measured = tmp_path / "rates.csv"
        assert run_cli(
            "tolerable", "--family", "qft", "--widths", "3:5", "--target", "0.66",
            "--seed", "2", "--output", str(measured), "--workers", "1",
        ) == 0
        out = tmp_path / "pred.csv"
        assert run_cli(
            "extrapolate", "--points", str(measured), "--gates", "114",
            "--family", "qft", "--output", str(out),
        ) == 0
        row = read_csv(out)[0]
        assert row["family"] == "qft"
        assert 0.0 < float(row["value"]) < 1.0

    def test_too_few_points(self):
        assert run_cli("extrapolate", "--point", "100", "0.01", "--gates", "500") == 2


class TestQvMode:
    def test_small_run(self, tmp_path):
        out = tmp_path / "r.csv"
        assert run_cli(
            "qv", "--width", "2", "--rate", "0.01", "--circuits", "3",
            "--runs", "50", "--seed", "4", "--output", str(out), "--workers", "1",
        ) == 0
        row = read_csv(out)[0]
        assert row["mode"] == "qv"
        assert row["samples"] == "3"
        assert 0.0 <= float(row["value"]) <= 1.0


class TestQasmInput:
    def test_success_from_file(self, tmp_path):
        source = "OPENQASM 2.0;\nqreg q[2];\nh q[0];\ncx q[0],q[1];\n"
        qasm_file = tmp_path / "bell.qasm"
        qasm_file.write_text(source)
        out = tmp_path / "r.csv"
        assert run_cli(
            "success", "--qasm", str(qasm_file), "--rate", "0.001",
            "--criterion", "correct-outcome", "--outcome", "00",
            "--output", str(out), "--workers", "1",
        ) == 0
        row = read_csv(out)[0]
        assert row["family"] == "bell"
        assert float(row["value"]) == pytest.approx(0.5, abs=0.02)

    def test_parse_error_is_runtime_failure(self, tmp_path):
        bad = tmp_path / "bad.qasm"
        bad.write_text("h q[0];")
        assert run_cli("success", "--qasm", str(bad), "--rate", "0.001") == 1

    def test_missing_file_is_runtime_failure(self, tmp_path):
        assert run_cli(
            "success", "--qasm", str(tmp_path / "nope.qasm"), "--rate", "0.001"
        ) == 1


class TestUsageErrors:
    def test_rate_above_one(self):
        assert run_cli("success", "--family", "qft", "--width", "3", "--rate", "1.5") == 2

    def test_missing_rate(self):
        assert run_cli("success", "--family", "qft", "--width", "3") == 2

    def test_rate_and_rates_conflict(self):
        assert run_cli(
            "success", "--family", "qft", "--width", "3",
            "--rate", "0.1", "--rates", "0.1", "0.1", "0.1",
        ) == 2

    def test_width_and_widths_conflict(self):
        assert run_cli(
            "sweep", "--family", "qft", "--width", "3", "--widths", "3:4", "--rate", "0.1"
        ) == 2

    def test_unknown_family(self):
        assert run_cli("success", "--family", "shor", "--width", "3", "--rate", "0.1") == 2

    def test_bad_widths_spec(self):
        assert run_cli("sweep", "--family", "qft", "--widths", "a:b", "--rate", "0.1") == 2

    def test_bad_target(self):
        assert run_cli("tolerable", "--family", "qft", "--width", "3", "--target", "1.5") == 2

    def test_family_and_qasm_conflict(self, tmp_path):
        f = tmp_path / "c.qasm"
        f.write_text("OPENQASM 2.0; qreg q[1]; h q[0];")
        assert run_cli(
            "success", "--family", "qft", "--width", "3", "--qasm", str(f), "--rate", "0.1"
        ) == 2

    def test_family_param_with_width_range(self):
        assert run_cli(
            "tolerable", "--family", "bv", "--widths", "3:4",
            "--hidden-string", "11", "--target", "0.5",
        ) == 2

    def test_outcome_required_for_imported_correct_outcome(self, tmp_path):
        f = tmp_path / "c.qasm"
        f.write_text("OPENQASM 2.0; qreg q[1]; x q[0];")
        assert run_cli(
            "success", "--qasm", str(f), "--rate", "0.01", "--criterion", "correct-outcome"
        ) == 2


class TestRuntimeFailures:
    def test_width_beyond_memory_budget(self):
        assert run_cli(
            "success", "--family", "qft", "--width", "12", "--rate", "0.001",
            "--memory-budget", "65536", "--workers", "1",
        ) == 1

    def test_unreachable_target(self, tmp_path):
        f = tmp_path / "x.qasm"
        f.write_text("OPENQASM 2.0; qreg q[1]; x q[0];")
        assert run_cli(
            "tolerable", "--qasm", str(f), "--target", "0.5",
            "--criterion", "correct-outcome", "--outcome", "0", "--workers", "1",
        ) == 1


class TestDeterminism:
    def test_identical_bytes_across_runs_and_workers(self, tmp_path):
        outputs = []
        for tag, workers in (("a", "1"), ("b", "1"), ("c", "2")):
            out = tmp_path / f"{tag}.json"
            assert run_cli(
                "success", "--family", "qft", "--width", "3", "--rate", "0.08",
                "--runs", "60", "--seed", "11", "--format", "json",
                "--output", str(out), "--workers", workers,
            ) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_csv_and_json_values_agree(self, tmp_path):
        args = (
            "tolerable", "--family", "hlf", "--width", "4", "--target", "0.66",
            "--seed", "5", "--workers", "1",
        )
        csv_out = tmp_path / "r.csv"
        json_out = tmp_path / "r.json"
        assert run_cli(*args, "--format", "csv", "--output", str(csv_out)) == 0
        assert run_cli(*args, "--format", "json", "--output", str(json_out)) == 0
        row = read_csv(csv_out)[0]
        record = json.loads(json_out.read_text())[0]
        assert float(row["value"]) == record["value"]
        assert row["regime"] == record["regime"]
        for column in CSV_COLUMNS:
            text = row[column]
            value = record[column]
            if text == "":
                assert value is None
            elif isinstance(value, float):
                assert float(text) == value
            else:
                assert text == str(value)

    def test_stdout_output(self, capsys):
        assert run_cli(
            "success", "--family", "qft", "--width", "3", "--rate", "0.001",
            "--workers", "1",
        ) == 0
        captured = capsys.readouterr()
        assert captured.out.startswith(",".join(CSV_COLUMNS)[:20])
