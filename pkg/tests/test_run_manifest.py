"""
Tests for run manifests and the published-table catalogue.
"""

import logging

import pytest

from src.core.errors import ArgumentError
from src.core.model import parse_key_values
from src.harness.run_manifest import RunManifest, engine_versions, manifest_path
from src.harness.tables import ESTIMATED_RHO_NS, KNOWN_RHO_NS, TABLE_RHOS, all_tables, cell_seed, get_table


def test_manifest_lifecycle():
    """Test running → completed with end and wall time recorded."""
    manifest = RunManifest.start("fwer", {"n": 100000, "alpha": 0.05, "method": None}, seed=3, reps=1000)
    assert manifest.status == "running"
    assert manifest.run_id.startswith("fwer_")
    assert manifest.parameters == {"n": "100000", "alpha": "0.05"}
    assert manifest.wall_time_seconds is None

    manifest.finish()
    assert manifest.status == "completed"
    assert manifest.end_time is not None
    assert manifest.wall_time_seconds >= 0.0


def test_manifest_rejects_invalid_status():
    """Test that only terminal statuses are accepted by finish()."""
    manifest = RunManifest.start("fwer", {})
    with pytest.raises(ArgumentError):
        manifest.finish("running")
    with pytest.raises(ArgumentError):
        manifest.finish("done")


def test_manifest_text_uses_config_grammar(tmp_path):
    """Test that the written manifest parses as key = value lines."""
    manifest = RunManifest.start("table", {"table": 3}, seed=0, reps=200)
    manifest.rows_written = 25
    manifest.finish("cancelled", error_message="stopped\nby signal")
    path = manifest.write(tmp_path / "out.csv")

    assert path == tmp_path / "out.csv.manifest"
    values = parse_key_values(path.read_text(encoding="utf-8"))
    assert values["status"] == "cancelled"
    assert values["rows_written"] == "25"
    assert values["param.table"] == "3"
    assert values["error_message"] == "stopped by signal"
    assert values["version.numpy"] == engine_versions()["numpy"]


def test_manifest_emit_to_log_for_stdout(tmp_path, caplog):
    """Test that stdout runs log the manifest instead of writing a file."""
    manifest = RunManifest.start("estimate-rho", {"data": "x.txt"})
    manifest.finish()
    # the src logger tree does not propagate once setup_logging has run
    module_logger = logging.getLogger("src.harness.run_manifest")
    module_logger.addHandler(caplog.handler)
    try:
        with caplog.at_level("INFO", logger="src.harness.run_manifest"):
            manifest.emit(None)
    finally:
        module_logger.removeHandler(caplog.handler)
    assert "Run manifest" in caplog.text
    assert not (tmp_path / "None.manifest").exists()
    assert manifest_path("results.csv").name == "results.csv.manifest"


def test_table_catalogue_shapes():
    """Test the eight published tables and their grids."""
    tables = all_tables()
    assert [table.table_id for table in tables] == list(range(1, 9))
    for table in tables:
        cells = list(table.cells())
        expected_ns = ESTIMATED_RHO_NS if table.estimate_rho else KNOWN_RHO_NS
        assert len(cells) == len(expected_ns) * len(TABLE_RHOS)
        assert [cell.index for cell in cells] == list(range(len(cells)))
    assert [table.alpha for table in tables] == [0.15, 0.10, 0.05, 0.01] * 2


def test_table_lookup():
    """Test individual cells and the method per table."""
    table = get_table(3)
    assert table.method == "mc-fast"
    assert table.published_value(10 ** 5, 0.5) == 0.07137
    assert get_table(7).method == "mc-full"
    assert get_table(7).published_value(5000, 0.5) == 0.0807
    with pytest.raises(ArgumentError):
        get_table(0)
    with pytest.raises(ArgumentError):
        table.published_value(123, 0.5)


def test_cell_seeds_are_distinct_and_stable():
    """Test per-cell seeds derived from the master seed."""
    seeds = [cell_seed(0, 3, index) for index in range(25)]
    assert len(set(seeds)) == 25
    assert seeds == [cell_seed(0, 3, index) for index in range(25)]
    assert cell_seed(1, 3, 0) != seeds[0]
    assert all(0 <= seed < 2 ** 64 for seed in seeds)
