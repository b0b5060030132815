"""Tests for the result CSV and logging helpers."""

from __future__ import annotations

import csv
import logging
from pathlib import Path

import pytest
from rich.logging import RichHandler

from hgmaps import logging as result_logging
from hgmaps.cli import main


def _read_csv(path: Path) -> tuple[list[str], list[dict[str, str]]]:
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        rows = list(reader)
        assert reader.fieldnames is not None
        return reader.fieldnames, rows


def _row(**overrides: object) -> result_logging.ResultRow:
    values: dict[str, object] = {
        "suite": "lift",
        "backend": "torus",
        "degree": 4,
        "grid": 128,
        "character": "0,0",
        "relation": 1,
        "point": "0.45+0.48i",
        "numerator": "0.25+0j",
        "denominator": "0.5+0j",
        "ratio": "0.5+0j",
        "decomposition_residual": 1.5e-14,
        "closedness_residual": 2.5e-9,
        "projection_residual": 3.5e-10,
        "status": "ok",
    }
    values.update(overrides)
    return result_logging.ResultRow(**values)  # type: ignore[arg-type]


def test_open_csv_writes_header(tmp_path: Path) -> None:
    path = tmp_path / "verify.csv"
    row = _row()

    with result_logging.open_csv(path) as writer:
        writer.write_row(row)

    headers, rows = _read_csv(path)
    assert headers == result_logging.CSV_HEADERS
    assert len(rows) == 1
    parsed = rows[0]
    assert parsed["suite"] == "lift"
    assert int(parsed["grid"]) == row.grid
    assert int(parsed["relation"]) == row.relation
    assert float(parsed["closedness_residual"]) == pytest.approx(row.closedness_residual)
    assert float(parsed["projection_residual"]) == pytest.approx(row.projection_residual)


def test_open_csv_appends_rows_without_duplicate_header(tmp_path: Path) -> None:
    path = tmp_path / "verify.csv"

    with result_logging.open_csv(path) as writer:
        writer.write_row(_row(relation=0))

    with result_logging.open_csv(path) as writer:
        writer.write_rows([_row(relation=1), _row(relation=2)])

    headers, rows = _read_csv(path)
    assert headers == result_logging.CSV_HEADERS
    assert [int(row["relation"]) for row in rows] == [0, 1, 2]


def test_exact_rows_leave_grid_blank(tmp_path: Path) -> None:
    path = tmp_path / "verify.csv"
    with result_logging.open_csv(path) as writer:
        writer.write_row(_row(backend="p1", grid=None, relation=None, ratio="1/2"))

    _, rows = _read_csv(path)
    assert rows[0]["grid"] == ""
    assert rows[0]["relation"] == ""
    assert rows[0]["ratio"] == "1/2"


def test_verify_command_writes_result_csv(tmp_path: Path) -> None:
    code = main(["verify", "--suite", "lift", "--degree", "2", "--output-dir", str(tmp_path)])
    assert code == 0

    headers, rows = _read_csv(tmp_path / "verify.csv")
    assert headers == result_logging.CSV_HEADERS
    assert {row["ratio"] for row in rows} == {"1/2"}
    assert {row["backend"] for row in rows} == {"p1"}


def test_configure_logging_installs_rich_handler() -> None:
    result_logging.configure_logging(verbose=True)
    root = logging.getLogger()
    assert root.level == logging.DEBUG
    assert any(isinstance(handler, RichHandler) for handler in root.handlers)
