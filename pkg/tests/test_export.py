import json

import numpy as np
import openpyxl
import pytest

from export.result_exporter import ResultExporter, _plain, atomic_write_bytes, format_for
from models.errors import ValidationError

ROWS = [{"N": 11, "logical_qubits": 177, "toffoli_per_shot": 3.2e9, "shots": 133},
        {"N": 15, "logical_qubits": 190, "toffoli_per_shot": 7.5e9, "shots": 133}]


def test_format_from_suffix():
    assert format_for("out/table.CSV") == "csv"
    assert format_for("run.json") == "json"
    assert format_for("book.xlsx") == "xlsx"
    with pytest.raises(ValidationError):
        format_for("table.txt")


def test_plain_values():
    value = {"a": np.float64(1.5), "b": np.arange(3), 4: (1, 2), "z": 1 + 2j}
    assert _plain(value) == {"a": 1.5, "b": [0, 1, 2], "4": [1, 2], "z": {"re": 1.0, "im": 2.0}}


def test_atomic_write_replaces(tmp_path):
    path = tmp_path / "sub" / "result.json"
    atomic_write_bytes(path, b"first")
    atomic_write_bytes(path, b"second")
    assert path.read_bytes() == b"second"
    assert [p.name for p in path.parent.iterdir()] == ["result.json"]


def test_json_payload_separate_from_metadata(tmp_path):
    path = tmp_path / "run.json"
    exporter = ResultExporter()
    exporter.export({"value": np.float64(0.25)}, [], path, metadata={"command": "estimate"})
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["payload"] == {"value": 0.25}
    assert document["metadata"]["command"] == "estimate"
    assert "written_at" in document["metadata"]
    assert ResultExporter.payload_json({"b": 1, "a": 2}).index('"a"') < ResultExporter.payload_json({"b": 1, "a": 2}).index('"b"')


def test_csv_rows(tmp_path):
    path = tmp_path / "table.csv"
    assert ResultExporter().export({}, ROWS, path) == "csv"
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "N,logical_qubits,toffoli_per_shot,shots"
    assert lines[1] == "11,177,3200000000.0,133"
    assert ResultExporter.csv_text([]) == ""


def test_xlsx_formatting(tmp_path):
    path = tmp_path / "table.xlsx"
    ResultExporter().export({}, ROWS, path)
    sheet = openpyxl.load_workbook(path).active
    assert sheet.title == "Estimates"
    assert [c.value for c in sheet[1]] == list(ROWS[0])
    assert sheet["A1"].font.bold
    assert sheet["C2"].number_format == "0.00E+00"
    assert sheet["B2"].number_format == "General"
    assert sheet.max_row == 3
