"""Parallel map over independent verification cells."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

LOGGER = logging.getLogger(__name__)

WORKERS_ENV = "HGMAPS_WORKERS"

Cell = TypeVar("Cell")
Result = TypeVar("Result")


def _parse_env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    if value is None or not value.strip():
        return default
    try:
        parsed = int(value)
    except ValueError:
        LOGGER.warning("Ignoring %s=%r: not an integer", name, value)
        return default
    if parsed < 1:
        LOGGER.warning("Ignoring %s=%r: must be at least 1", name, value)
        return default
    return parsed


def resolve_workers(configured: int | None = None) -> int:
    """Worker count from the configuration, else ``HGMAPS_WORKERS``, else 1."""

    if configured is not None and configured >= 1:
        return configured
    return _parse_env_int(WORKERS_ENV, 1)


def map_cells(
    task: Callable[[Cell], Result], cells: Sequence[Cell], workers: int = 1
) -> list[Result]:
    """Apply ``task`` to every cell, in input order.

    Cells share only immutable backend state, so they run on a thread pool
    when ``workers > 1``.
    """

    if workers <= 1 or len(cells) <= 1:
        return [task(cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, cells))


__all__ = ["WORKERS_ENV", "map_cells", "resolve_workers"]
