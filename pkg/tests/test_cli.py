"""
End-to-end tests for the command-line harness.

Commands are driven through main(argv) so exit codes, CSV output and
manifests are checked exactly as a shell user would see them.
"""

import argparse
import csv
import io
import math

import pytest

from src.harness.cli import (
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_USAGE,
    ResultWriter,
    cmd_table,
    format_value,
    main,
)
from src.harness.run_manifest import manifest_path
from src.utils.signal_handler import GracefulShutdownHandler


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_format_value():
    """Test CSV cell formatting."""
    assert format_value(None) == ""
    assert format_value(True) == "1"
    assert format_value(False) == "0"
    assert format_value(100000) == "100000"
    assert format_value(0.0713712345) == "0.0713712"
    assert format_value("test-i") == "test-i"


def test_result_writer_uses_newline_endings():
    """Test header, rows and the data-row counter."""
    stream = io.StringIO()
    writer = ResultWriter(stream)
    writer.header(["a", "b"])
    writer.row([1, 0.5])
    assert stream.getvalue() == "a,b\n1,0.5\n"
    assert writer.rows == 1


def test_estimate_rho_four_points(capsys, sample_data_dir):
    """Test the worked example through the CLI."""
    code, out = run(capsys, "estimate-rho", str(sample_data_dir / "four_points.txt"))
    assert code == EXIT_OK
    assert out == "n,pairs,rho_hat_star,raw_mean\n4,2,0.5,0.5\n"


def test_fwer_quadrature(capsys):
    """Test the deterministic FWER row for n = 1e5, α = 0.05, ρ = 0.5."""
    code, out = run(capsys, "fwer", "--n", "1e5", "--alpha", "0.05", "--rho", "0.5", "--method", "quadrature")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert row["n"] == "100000"
    assert row["method"] == "quadrature"
    assert row["procedure"] == "test-i"
    assert abs(float(row["estimate"]) - 0.07137) < 0.004
    assert row["se"] == "" and row["reps"] == "" and row["seed"] == ""


def test_fwer_fast_is_thread_independent(capsys):
    """Test identical CSV for 1 and 3 threads."""
    base = ["fwer", "--n", "1e6", "--alpha", "0.1", "--rho", "0.3", "--method", "mc-fast", "--reps", "20000"]
    code_one, single = run(capsys, *base, "--threads", "1")
    code_three, threaded = run(capsys, *base, "--threads", "3")
    assert code_one == code_three == EXIT_OK
    assert single == threaded
    assert rows(single)[0]["reps"] == "20000"


def test_fwer_bonferroni_cutoff(capsys):
    """Test the Bonferroni variant is labelled and far below the proposed FWER at large n."""
    code, out = run(capsys, "fwer", "--n", "1e9", "--alpha", "0.05", "--rho", "0.5", "--cutoff", "bonferroni")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert row["procedure"] == "bonferroni"
    assert float(row["estimate"]) < 0.01


def test_fwer_from_config_file(capsys, sample_data_dir):
    """Test flags supplied by a key = value config."""
    code, out = run(capsys, "fwer", "--config", str(sample_data_dir / "global_null.conf"))
    assert code == EXIT_OK
    (row,) = rows(out)
    assert row["n"] == "100000" and row["rho"] == "0.5"


def test_fwer_estimated_rho_full_vector(capsys):
    """Test an estimated-ρ run with a data-generating ρ."""
    code, out = run(capsys, "fwer", "--n", "500", "--alpha", "0.1", "--rho", "estimate", "--data-rho", "0.5",
                    "--method", "mc-full", "--reps", "100", "--seed", "3")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert row["procedure"] == "test-ii"
    assert row["rho"] == "0.5"
    assert 0.0 <= float(row["estimate"]) <= 1.0


@pytest.mark.parametrize("argv", [
    ["fwer", "--n", "1e5", "--alpha", "0.05", "--method", "mc-fast"],
    ["fwer", "--n", "1e5", "--alpha", "0.05", "--rho", "estimate", "--method", "quadrature"],
    ["fwer", "--n", "1e5", "--alpha", "0.05", "--rho", "0.5", "--method", "simulate"],
    ["power", "--n", "100", "--alpha", "0.05", "--rho", "0.5"],
    ["table", "--table", "9"],
    ["reject", "/nonexistent/data.txt", "--alpha", "0.05", "--rho", "0.5"],
])
def test_usage_errors_exit_two(capsys, argv):
    """Test missing or inconsistent arguments."""
    code, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ["fwer", "--n", "1e5", "--alpha", "1.5", "--rho", "0.5"],
    ["fwer", "--n", "1e5", "--alpha", "0.05", "--rho", "1.0"],
    ["fwer", "--n", "1", "--alpha", "0.05", "--rho", "0.5"],
    ["kfwer", "--n", "10", "--k", "11", "--alpha", "0.05", "--rho", "0.5"],
])
def test_domain_errors_exit_three(capsys, argv):
    """Test parameters outside their numeric domain."""
    code, _ = run(capsys, *argv)
    assert code == EXIT_DOMAIN


def test_help_exits_zero(capsys):
    """Test --help."""
    assert main(["--help"]) == EXIT_OK


def test_kfwer_quadrature(capsys):
    """Test k-FWER at n = 1e6, k = 3 is near α."""
    code, out = run(capsys, "kfwer", "--n", "1e6", "--k", "3", "--alpha", "0.05", "--rho", "0.5")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert row["k"] == "3"
    assert abs(float(row["estimate"]) - 0.05) < 0.02


def test_power_quadrature_proposed_beats_bonferroni(capsys):
    """Test the power command for both cutoffs."""
    base = ["power", "--n", "1e5", "--alpha", "0.05", "--rho", "0.5", "--n1", "5e4", "--mu", "2"]
    code, proposed = run(capsys, *base)
    assert code == EXIT_OK
    code, bonferroni = run(capsys, *base, "--cutoff", "bonferroni")
    assert code == EXIT_OK
    assert rows(proposed)[0]["n1"] == "50000"
    assert float(rows(proposed)[0]["estimate"]) - float(rows(bonferroni)[0]["estimate"]) >= 0.1


def test_power_with_false_null_means(capsys, sample_data_dir):
    """Test power from the sparse-alternative config by full-vector simulation."""
    code, out = run(capsys, "power", "--config", str(sample_data_dir / "sparse_alternative.conf"),
                    "--n", "1000", "--method", "mc-full", "--reps", "200")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert row["n1"] == "10"


def test_reject_marks_large_statistic(capsys, write_statistics):
    """Test per-hypothesis decisions with 1-based indices."""
    path = write_statistics([10.0, 0.0, 0.0, 0.0])
    code, out = run(capsys, "reject", str(path), "--alpha", "0.05", "--rho", "0.5")
    assert code == EXIT_OK
    decisions = rows(out)
    assert [row["index"] for row in decisions] == ["1", "2", "3", "4"]
    assert [row["rejected"] for row in decisions] == ["1", "0", "0", "0"]
    assert len({row["cutoff"] for row in decisions}) == 1


def test_reject_with_blocks(capsys, write_statistics):
    """Test the block procedure through reject."""
    path = write_statistics([10.0, 0.0, 0.0, 0.0, 0.0, 10.0])
    code, out = run(capsys, "reject", str(path), "--alpha", "0.05", "--blocks", "2:0.5,4:0.8")
    assert code == EXIT_OK
    decisions = rows(out)
    assert [row["rejected"] for row in decisions] == ["1", "0", "0", "0", "0", "1"]
    assert decisions[0]["cutoff"] == decisions[1]["cutoff"] != decisions[2]["cutoff"]


def test_reject_bad_data_line(capsys, tmp_path):
    """Test a non-numeric data line."""
    path = tmp_path / "bad.txt"
    path.write_text("1.0\nabc\n", encoding="utf-8")
    code, _ = run(capsys, "reject", str(path), "--alpha", "0.05", "--rho", "0.5")
    assert code == EXIT_USAGE


def test_block_quadrature(capsys):
    """Test the block product formula sits above α for four blocks of 5000."""
    code, out = run(capsys, "block", "--blocks", "5000:0.5,5000:0.5,5000:0.5,5000:0.5", "--alpha", "0.05",
                    "--method", "quadrature")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert (row["m"], row["n"]) == ("4", "20000")
    assert 0.05 < float(row["estimate"]) < 0.15


def test_block_cross_rho_needs_simulation(capsys):
    """Test that λ > 0 is refused by the quadrature method."""
    code, _ = run(capsys, "block", "--blocks", "100:0.5,100:0.5", "--alpha", "0.05", "--method", "quadrature",
                  "--cross-rho", "0.2")
    assert code == EXIT_USAGE


def test_block_simulation(capsys):
    """Test a small block simulation with cross-block correlation."""
    code, out = run(capsys, "block", "--blocks", "200:0.5,200:0.5", "--alpha", "0.05", "--cross-rho", "0.2",
                    "--reps", "100", "--seed", "1")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert row["method"] == "mc-full" and row["reps"] == "100"


def test_table_is_reproducible_and_writes_manifest(capsys, tmp_path):
    """Test byte-identical table output for the same seed, plus the manifest."""
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    for out in (first, second):
        assert main(["table", "--table", "3", "--reps", "200", "--seed", "7", "--out", str(out)]) == EXIT_OK
    capsys.readouterr()

    assert first.read_bytes() == second.read_bytes()
    table_rows = rows(first.read_text(encoding="utf-8"))
    assert len(table_rows) == 25
    assert {row["method"] for row in table_rows} == {"mc-fast"}
    assert table_rows[0]["published"] == "0.15635"
    for row in table_rows:
        quadrature = float(row["quadrature"])
        se = math.sqrt(quadrature * (1 - quadrature) / 200)
        assert abs(float(row["estimate"]) - quadrature) <= 4 * se

    manifest = manifest_path(first).read_text(encoding="utf-8")
    assert "status = completed" in manifest
    assert "rows_written = 25" in manifest
    assert "param.table = 3" in manifest


def test_table_cancellation_stops_before_next_cell():
    """Test that a pending shutdown request yields a header-only, cancelled run."""
    handler = GracefulShutdownHandler()
    handler.request_shutdown()
    stream = io.StringIO()
    args = argparse.Namespace(table=3, reps=10, seed=0, threads=1, no_quadrature=True)
    try:
        assert cmd_table(args, ResultWriter(stream), handler) == "cancelled"
    finally:
        handler.cleanup()
    assert stream.getvalue() == ",".join(
        ("table", "n", "alpha", "rho", "method", "estimate", "se", "reps", "seed", "quadrature", "published")
    ) + "\n"


def test_failed_run_writes_failed_manifest(capsys, tmp_path):
    """Test that an error after the run started still leaves a manifest."""
    out = tmp_path / "result.csv"
    code = main(["fwer", "--n", "1e5", "--alpha", "0.05", "--rho", "0.5", "--method", "mc-fast",
                 "--false-null-means", "1:2.0", "--out", str(out)])
    assert code == EXIT_USAGE
    manifest = manifest_path(out).read_text(encoding="utf-8")
    assert "status = failed" in manifest
    assert "error_message = mc-fast runs under the global null only" in manifest
