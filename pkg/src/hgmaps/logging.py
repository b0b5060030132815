"""CSV tables of per-cell ratios and residuals."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

from rich.logging import RichHandler

CSV_HEADERS = [
    "suite",
    "backend",
    "degree",
    "grid",
    "character",
    "relation",
    "point",
    "numerator",
    "denominator",
    "ratio",
    "decomposition_residual",
    "closedness_residual",
    "projection_residual",
    "status",
]


@dataclass(slots=True)
class ResultRow:
    """One verification cell as written to the results CSV."""

    suite: str
    backend: str
    degree: int
    grid: int | None
    character: str
    relation: int | None
    point: str
    numerator: str
    denominator: str
    ratio: str
    decomposition_residual: float
    closedness_residual: float
    projection_residual: float
    status: str

    def as_sequence(self) -> list[str | float | int]:
        """Return the row as a list suitable for csv.writer."""

        return [
            self.suite,
            self.backend,
            self.degree,
            "" if self.grid is None else self.grid,
            self.character,
            "" if self.relation is None else self.relation,
            self.point,
            self.numerator,
            self.denominator,
            self.ratio,
            self.decomposition_residual,
            self.closedness_residual,
            self.projection_residual,
            self.status,
        ]


class ResultCsvWriter:
    """Context manager that appends result rows to a CSV file."""

    __slots__ = ("_handle", "_writer", "path")

    def __init__(self, handle: TextIO, path: Path) -> None:
        self._handle = handle
        self._writer = csv.writer(handle)
        self.path = path

    def __enter__(self) -> "ResultCsvWriter":
        return self

    def __exit__(self, *_exc_info) -> None:
        self.close()

    def write_header(self) -> None:
        self._writer.writerow(CSV_HEADERS)
        self._handle.flush()

    def write_row(self, row: ResultRow) -> None:
        self._writer.writerow(row.as_sequence())
        self._handle.flush()

    def write_rows(self, rows: Iterable[ResultRow]) -> None:
        for row in rows:
            self.write_row(row)

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.flush()
            self._handle.close()


def open_csv(path: Path) -> ResultCsvWriter:
    """Open *path* for appending rows, writing the header for new or empty files."""

    path.parent.mkdir(parents=True, exist_ok=True)
    need_header = not path.exists() or path.stat().st_size == 0
    handle = path.open("a", encoding="utf-8", newline="")
    writer = ResultCsvWriter(handle, path)
    if need_header:
        writer.write_header()
    return writer


def configure_logging(verbose: bool = False) -> None:
    """Route log records through rich's console handler."""

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=False, show_path=False)],
        force=True,
    )


__all__ = ["CSV_HEADERS", "ResultCsvWriter", "ResultRow", "configure_logging", "open_csv"]
