import json

import pytest

from MagnonFisher.errors import ConfigError, IoError
from MagnonFisher.outputs import (
    CsvOutput,
    ManagerOutputs,
    emit,
    emit_report,
    format_value,
    read_csv,
    registered_outputs,
    run_metadata,
    write_csv_text,
)
from MagnonFisher.params import two_pi_mhz
from MagnonFisher.sweep import AxisSpec, SkipRecord, SweepResult, SweepSpec, run_sweep


@pytest.fixture(scope="module")
def small_result():
    from MagnonFisher.params import SystemParams

    spec = SweepSpec(axis=AxisSpec("g", start=two_pi_mhz(40.0), stop=two_pi_mhz(42.0), points=2), quantities=("qfi_global",))
    return run_sweep(spec, SystemParams.baseline())


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(True) == "true"
    assert format_value(None) == ""
    assert format_value(3) == "3"


def test_empty_sweep_has_header_only(small_result):
    empty = SweepResult(spec=small_result.spec, columns=small_result.columns)
    text = CsvOutput().render_sweep(empty, {})
    assert text == ",".join(small_result.columns) + "\n"


def test_csv_reingests_losslessly(small_result, tmp_path):
    path = tmp_path / "sweep.csv"
    emit(small_result, "csv", path)
    columns, rows = read_csv(path)
    assert tuple(columns) == small_result.columns
    assert rows == [{c: row[c] for c in small_result.columns} for row in small_result.rows]
    assert write_csv_text(columns, rows) == path.read_text(encoding="utf-8")


def test_json_document(small_result, tmp_path):
    skipped = SweepResult(
        spec=small_result.spec,
        columns=small_result.columns,
        rows=small_result.rows,
        skipped=[SkipRecord(index=2, point={"g": 1.0}, reason="unstable", message="drift")],
        base=small_result.base,
    )
    path = tmp_path / "sweep.json"
    emit(skipped, "json", path)
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["columns"] == list(small_result.columns)
    assert len(document["records"]) == 2
    assert document["skipped"][0]["reason"] == "unstable"
    metadata = document["metadata"]
    assert metadata["rows"] == 2 and metadata["skipped"] == 1
    assert {"version", "config_sha256", "constants", "sweep", "base_params"} <= set(metadata)


def test_metadata_is_deterministic(small_result):
    assert run_metadata(small_result) == run_metadata(small_result)
    assert run_metadata(small_result, "abc")["config_sha256"] == "abc"


def test_non_finite_values_become_null(capsys):
    emit_report({"xi": float("nan"), "nested": {"F": float("inf")}}, "json")
    document = json.loads(capsys.readouterr().out)
    assert document == {"xi": None, "nested": {"F": None}}


def test_report_as_csv(capsys):
    emit_report({"mode": "a2", "optimum": {"theta": 0.5}}, "csv", "-")
    assert capsys.readouterr().out == "mode,optimum.theta\na2,0.5\n"


def test_unwritable_path(small_result, tmp_path):
    with pytest.raises(IoError):
        emit(small_result, "csv", tmp_path / "missing" / "sweep.csv")


def test_manager():
    manager = ManagerOutputs([CsvOutput()])
    assert manager.get_names() == ["csv"]
    manager.unregister("csv")
    with pytest.raises(ConfigError):
        manager.get("csv")
    assert registered_outputs.get_names() == ["csv", "json"]
