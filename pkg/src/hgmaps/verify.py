"""Executable checks of the Hodge–Gaussian map with measured residuals."""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .contract import TRIVIAL_CHARACTER, GaussImage
from .exact.matrices import ExactMatrix
from .exact.polynomials import Polynomial
from .exact.scalars import Scalar, format_scalar, from_int, parse_complex, parse_gaussian, to_complex
from .gauss import gauss_rho, gauss_rho_derivative_form, lifting_ratio, section_weights, symmetry_pair
from .logging import ResultRow
from .p1 import P1Backend, schiffer_span
from .persistence import ConfigError, RunConfig, load_reference
from .relations import RelationSpace, SymmetricTensor, relation_space
from .runner import map_cells, resolve_workers
from .torus.backend import TorusBackend
from .torus.geometry import TorusGeometry

LOGGER = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

DEGENERATE_RELATIVE = 1e-8
DERIVATIVE_FIXTURES = ((2, 1), (3, 1), (3, 2), (4, 2))

Backend = P1Backend | TorusBackend


@dataclass(slots=True)
class VerificationReport:
    """Outcome of one suite: fixture, measurements, status and per-cell rows."""

    check: str
    fixture: dict[str, Any]
    measured: dict[str, Any]
    status: str
    wall_time: float = 0.0
    rows: list[ResultRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self, record_timing: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {
            "check": self.check,
            "status": self.status,
            "fixture": _jsonable(self.fixture),
            "measured": _jsonable(self.measured),
            "cells": len(self.rows),
        }
        if record_timing:
            data["wall_time"] = self.wall_time
        return data


@dataclass(frozen=True, slots=True)
class Cell:
    relation_index: int
    relation: SymmetricTensor
    point: Any


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    if isinstance(value, complex):
        return format_scalar(value)
    return value


def _format_character(character: tuple[float, float]) -> str:
    return f"{character[0]:g},{character[1]:g}"


# -- fixtures -----------------------------------------------------------------


def make_backend(config: RunConfig, *, grid: int | None = None) -> Backend:
    """Untwisted backend described by *config*."""

    if config.backend == "p1":
        return P1Backend(config.degree, tolerances=config.tolerances)
    return torus_backend(config, grid=grid)


def torus_backend(config: RunConfig, *, grid: int | None = None) -> TorusBackend:
    return TorusBackend(
        config.geometry(grid),
        config.degree,
        bump_radius=config.bump_radius,
        tolerances=config.tolerances,
    )


def sample_points(config: RunConfig, backend: Backend) -> list[Any]:
    if isinstance(backend, TorusBackend):
        return config.torus_points(backend.geometry)
    return config.p1_points()


def focus_point(config: RunConfig, backend: Backend) -> Any:
    """``config.point`` if set, else the first sample point."""

    if config.point is None:
        return sample_points(config, backend)[0]
    if isinstance(backend, TorusBackend):
        return parse_complex(config.point)
    return parse_gaussian(config.point)


def fixture(config: RunConfig, backend: Backend, points: Sequence[Any], **extra: Any) -> dict[str, Any]:
    data: dict[str, Any] = {
        "backend": config.backend,
        "degree": config.degree,
        "k": config.k,
        "m": config.m,
        "points": [format_scalar(p) for p in points],
    }
    if isinstance(backend, TorusBackend):
        data.update(
            tau=config.tau,
            grid=backend.geometry.grid,
            metric_scale=backend.geometry.metric_scale,
            bump_radius=backend.bump_radius,
            character=list(backend.character),
            seed=config.seed,
        )
    data.update(extra)
    data["tolerances"] = config.tolerances.to_dict()
    return data


def _cells(space: RelationSpace, points: Sequence[Any]) -> list[Cell]:
    return [Cell(index, tensor, point) for index, tensor in enumerate(space.basis) for point in points]


def _grid(backend: Backend) -> int | None:
    return backend.geometry.grid if isinstance(backend, TorusBackend) else None


def _character(backend: Backend) -> tuple[float, float]:
    return backend.character if isinstance(backend, TorusBackend) else TRIVIAL_CHARACTER


def _row(
    suite: str,
    backend: Backend,
    cell: Cell | None,
    *,
    numerator: Scalar | str = "",
    denominator: Scalar | str = "",
    ratio: Scalar | str = "",
    image: GaussImage | None = None,
    status: str = "ok",
) -> ResultRow:
    def text(value: Scalar | str) -> str:
        return value if isinstance(value, str) else format_scalar(value)

    return ResultRow(
        suite=suite,
        backend=backend.name,
        degree=backend.degree,
        grid=_grid(backend),
        character=_format_character(_character(backend)),
        relation=None if cell is None else cell.relation_index,
        point="" if cell is None else format_scalar(cell.point),
        numerator=text(numerator),
        denominator=text(denominator),
        ratio=text(ratio),
        decomposition_residual=0.0 if image is None else image.decomposition_residual,
        closedness_residual=0.0 if image is None else image.closedness_residual,
        projection_residual=0.0 if image is None else image.projection_residual,
        status=status,
    )


def _timed(check: str, build: Callable[[], VerificationReport]) -> VerificationReport:
    start = time.perf_counter()
    report = build()
    report.wall_time = time.perf_counter() - start
    LOGGER.info("%s: %s in %.2fs", check, report.status, report.wall_time)
    return report


def _empty(check: str, fixture_data: dict[str, Any], space: RelationSpace) -> VerificationReport:
    LOGGER.warning("%s: I_%d is zero; nothing to verify", check, space.degree)
    return VerificationReport(check, fixture_data, {"relation_dimension": 0}, INCONCLUSIVE)


def _spread(values: Sequence[complex]) -> float:
    mean = sum(values) / len(values)
    if mean == 0:
        return math.inf
    return max(abs(v - mean) for v in values) / abs(mean)


# -- lifting ----------------------------------------------------------------------


def _ratio_protocol(
    check: str,
    backend: Backend,
    space: RelationSpace,
    points: Sequence[Any],
    workers: int,
) -> tuple[list[ResultRow], list[Scalar], dict[str, float], list[tuple[Cell, GaussImage]]]:
    """Lifting ratios over every ``(Q, P)`` cell with degenerate cells skipped.

    Also returns ``ρ_Q(ξ_P)`` for every cell so callers can reuse the images.
    """

    def task(cell: Cell) -> tuple[Cell, Scalar, Scalar, GaussImage]:
        numerator, denominator, image = lifting_ratio(backend, cell.relation, cell.point, strict=False)
        return cell, numerator, denominator, image

    results = map_cells(task, _cells(space, points), workers)
    if backend.exact:
        keep = [bool(denominator) for _, _, denominator, _ in results]
    else:
        largest = max((abs(denominator) for _, _, denominator, _ in results), default=0.0)
        keep = [abs(denominator) > DEGENERATE_RELATIVE * largest for _, _, denominator, _ in results]
    rows: list[ResultRow] = []
    ratios: list[Scalar] = []
    worst = {"decomposition": 0.0, "closedness": 0.0, "projection": 0.0, "aliasing": 0.0}
    for (cell, numerator, denominator, image), usable in zip(results, keep):
        worst["aliasing"] = max(worst["aliasing"], image.aliasing)
        if not usable:
            LOGGER.warning(
                "%s: μ2(Q%d) vanishes at %s; skipping the cell", check, cell.relation_index, format_scalar(cell.point)
            )
            rows.append(
                _row(check, backend, cell, numerator=numerator, denominator=denominator, image=image, status="skipped")
            )
            continue
        value = numerator / denominator
        ratios.append(value)
        worst["decomposition"] = max(worst["decomposition"], image.decomposition_residual)
        worst["closedness"] = max(worst["closedness"], image.closedness_residual)
        worst["projection"] = max(worst["projection"], image.projection_residual)
        LOGGER.debug(
            "%s: Q%d P=%s ratio %s", check, cell.relation_index, format_scalar(cell.point), format_scalar(value)
        )
        rows.append(_row(check, backend, cell, numerator=numerator, denominator=denominator, ratio=value, image=image))
    return rows, ratios, worst, [(cell, image) for cell, _, _, image in results]


def _reference_constant(path: Path | None) -> Scalar | None:
    pinned = load_reference(path).get("lifting_constant", {}).get("p1")
    return None if pinned is None else parse_gaussian(str(pinned))


def verify_lift(
    config: RunConfig, *, workers: int | None = None, reference_path: Path | None = None
) -> VerificationReport:
    """Constancy of ``pair(ξ_P, ρ_Q(ξ_P)) / v_P(μ2(Q))`` over a basis of ``I_2`` and sample points."""

    def build() -> VerificationReport:
        backend = make_backend(config)
        points = sample_points(config, backend)
        data = fixture(config, backend, points)
        space = relation_space(backend, 2)
        if not space.dimension:
            return _empty("lift", data, space)
        count = resolve_workers(workers or config.workers)
        rows, ratios, worst, _ = _ratio_protocol("lift", backend, space, points, count)
        return _judge_lift(backend, data, space, rows, ratios, worst, _reference_constant(reference_path))

    return _timed("lift", build)


def _judge_lift(
    backend: Backend,
    data: dict[str, Any],
    space: RelationSpace,
    rows: list[ResultRow],
    ratios: list[Scalar],
    worst: dict[str, float],
    reference: Scalar | None,
    *,
    check: str = "lift",
) -> VerificationReport:
    measured: dict[str, Any] = {
        "relation_dimension": space.dimension,
        "cells": len(rows),
        "usable_cells": len(ratios),
        "max_residuals": worst,
    }
    if not ratios:
        LOGGER.warning("%s: every sample point is degenerate", check)
        return VerificationReport(check, data, measured, INCONCLUSIVE, rows=rows)
    status = PASS
    if backend.exact:
        distinct = sorted({format_scalar(r) for r in ratios})
        constant = ratios[0]
        measured.update(constant=format_scalar(constant), distinct_ratios=distinct)
        if len(distinct) != 1:
            status = FAIL
        if reference is not None:
            measured["reference"] = format_scalar(reference)
            measured["matches_reference"] = constant == reference
            if constant != reference:
                status = FAIL
    else:
        values = [complex(r) for r in ratios]
        spread = _spread(values)
        constant = sum(values) / len(values)
        measured.update(constant=format_scalar(constant), spread=spread)
        if spread >= backend.tolerances.ratio_spread:
            status = FAIL
        if reference is not None:
            target = to_complex(reference)
            agreement = abs(constant - target) / abs(target)
            measured["reference"] = format_scalar(reference)
            measured["reference_agreement"] = agreement
            if agreement >= backend.tolerances.backend_agreement:
                status = FAIL
    degraded = _degraded(backend, worst)
    if degraded:
        LOGGER.warning("%s: σ residuals above tolerance (%s); ratios not trusted", check, ", ".join(degraded))
        measured["degraded"] = degraded
        status = FAIL
    return VerificationReport(check, data, measured, status, rows=rows)


def _degraded(backend: Backend, worst: dict[str, float]) -> list[str]:
    """Residual series whose worst usable cell exceeds its tolerance."""

    limits = {"closedness": backend.tolerances.closedness, "projection": backend.tolerances.projection}
    return [name for name, limit in limits.items() if worst[name] > limit]


def verify_twisted_lift(config: RunConfig, *, workers: int | None = None) -> VerificationReport:
    """Lifting ratios in the bundle twisted by a flat character ``χ``, and for ``-χ``."""

    if config.backend != "torus":
        raise ConfigError("the twisted suite needs the torus backend")
    if config.degree < 4:
        raise ConfigError(f"the twisted suite needs degree d >= 4, got {config.degree}")
    character = config.character_value()
    defaulted = character == TRIVIAL_CHARACTER
    if defaulted:
        character = (0.5, 0.0)
        LOGGER.info("twisted: no character configured; using χ = (1/2, 0)")

    def build() -> VerificationReport:
        base = torus_backend(config)
        points = sample_points(config, base)
        twisted = base.apply_flat_twist(character)
        data = fixture(config, twisted, points)
        space = relation_space(base, 2)
        if not space.dimension:
            return _empty("twisted", data, space)
        count = resolve_workers(workers or config.workers)
        rows, ratios, worst, _ = _ratio_protocol("twisted", twisted, space, points, count)
        report = _judge_lift(twisted, data, space, rows, ratios, worst, None, check="twisted")
        report.measured["character_defaulted"] = defaulted
        if report.status != PASS:
            return report
        conjugate = base.apply_flat_twist(((-character[0]) % 1.0, (-character[1]) % 1.0))
        more, conjugate_ratios, conjugate_worst, _ = _ratio_protocol("twisted", conjugate, space, points, count)
        report.rows.extend(more)
        degraded = _degraded(conjugate, conjugate_worst)
        if degraded:
            report.measured["conjugate_degraded"] = degraded
            report.status = FAIL
            return report
        if not conjugate_ratios:
            report.status = INCONCLUSIVE
            return report
        first = sum(complex(r) for r in ratios) / len(ratios)
        second = sum(complex(r) for r in conjugate_ratios) / len(conjugate_ratios)
        difference = abs(first - second) / abs(first)
        report.measured.update(
            conjugate_constant=format_scalar(second),
            conjugate_spread=_spread([complex(r) for r in conjugate_ratios]),
            conjugate_difference=difference,
        )
        if difference >= base.tolerances.ratio_spread:
            report.status = FAIL
        return report

    return _timed("twisted", build)


# -- well-definedness -------------------------------------------------------------


def _mobius_basis(degree: int) -> list[Polynomial]:
    """Sections ``(z + 1)^i (z - 2)^{d-i}``, an invertible change of the monomial basis."""

    plus = Polynomial.linear(from_int(-1))
    minus = Polynomial.linear(from_int(2))
    return [plus**i * minus ** (degree - i) for i in range(degree + 1)]


def _basis_transform(sections: Sequence[Polynomial], degree: int) -> list[list[Scalar]]:
    """Rows ``j``: coefficients of ``z^j`` in the new sections."""

    forward = ExactMatrix.from_rows([[s.coefficient(e) for e in range(degree + 1)] for s in sections], degree + 1)
    inverse = forward.inverse()
    return [list(inverse.entries[j]) for j in range(degree + 1)]


def verify_welldefined(config: RunConfig, *, workers: int | None = None) -> VerificationReport:
    """``ρ`` ignores the Dolbeault representative, the bump and the metric (and the section basis on P^1)."""

    def build() -> VerificationReport:
        backend = make_backend(config)
        points = sample_points(config, backend)
        data = fixture(config, backend, points)
        space = relation_space(backend, 2)
        if not space.dimension:
            return _empty("welldefined", data, space)
        count = resolve_workers(workers or config.workers)
        if isinstance(backend, P1Backend):
            return _welldefined_p1(config, backend, space, points, data, count)
        return _welldefined_torus(config, backend, space, points, data, count)

    return _timed("welldefined", build)


def _welldefined_p1(
    config: RunConfig,
    backend: P1Backend,
    space: RelationSpace,
    points: Sequence[Any],
    data: dict[str, Any],
    workers: int,
) -> VerificationReport:
    rng = random.Random(config.seed)
    shift = Polynomial((rng.randint(1, 3), rng.randint(-3, 3), rng.randint(-3, 3)))
    sections = _mobius_basis(backend.degree)
    rebased = backend.with_basis(sections)
    transform = _basis_transform(sections, backend.degree)

    def task(cell: Cell) -> tuple[Cell, GaussImage, bool, bool]:
        xi = backend.schiffer(cell.point, 1)
        image = gauss_rho(backend, cell.relation, xi, strict=False)
        perturbed = gauss_rho(backend, cell.relation, xi + backend.perturbation(cell.point, shift), strict=False)
        moved = gauss_rho(rebased, cell.relation.change_basis(transform), rebased.schiffer(cell.point, 1), strict=False)
        return cell, image, perturbed.coordinates == image.coordinates, moved.coordinates == image.coordinates

    rows: list[ResultRow] = []
    failures = {"perturbation": 0, "basis_change": 0}
    for cell, image, same_perturbed, same_moved in map_cells(task, _cells(space, points), workers):
        failures["perturbation"] += not same_perturbed
        failures["basis_change"] += not same_moved
        status = "ok" if same_perturbed and same_moved else "moved"
        rows.append(_row("welldefined", backend, cell, image=image, status=status))
    measured = {
        "relation_dimension": space.dimension,
        "perturbation_failures": failures["perturbation"],
        "basis_change_failures": failures["basis_change"],
        "perturbation": str(shift),
        "bump_radius": "not applicable (no bump is sampled)",
        "metric_scale": "not applicable (no metric enters)",
    }
    status = PASS if not any(failures.values()) else FAIL
    return VerificationReport("welldefined", data, measured, status, rows=rows)


def _welldefined_torus(
    config: RunConfig,
    backend: TorusBackend,
    space: RelationSpace,
    points: Sequence[Any],
    data: dict[str, Any],
    workers: int,
) -> VerificationReport:
    rng = np.random.default_rng(config.seed)
    shift = rng.normal(size=3) + 1j * rng.normal(size=3)
    smaller = backend.with_bump_radius(backend.bump_radius / 1.5)
    geometry = backend.geometry
    rescaled = backend.with_geometry(TorusGeometry(geometry.tau, geometry.grid, 2.0 * geometry.metric_scale))
    perturbation_radius = 0.8 * backend.bump_radius

    def task(cell: Cell) -> tuple[Cell, GaussImage, float, float, float]:
        xi = backend.schiffer(cell.point, 1)
        image = gauss_rho(backend, cell.relation, xi, strict=False)
        perturbed = backend.perturbation(cell.point, shift, radius=perturbation_radius)
        drift = image.distance(gauss_rho(backend, cell.relation, xi + perturbed, strict=False))
        radius = image.distance(gauss_rho(smaller, cell.relation, smaller.schiffer(cell.point, 1), strict=False))
        metric = image.distance(gauss_rho(rescaled, cell.relation, rescaled.schiffer(cell.point, 1), strict=False))
        return cell, image, drift, radius, metric

    rows: list[ResultRow] = []
    worst = {"perturbation": 0.0, "bump_radius": 0.0, "metric_scale": 0.0}
    for cell, image, drift, radius, metric in map_cells(task, _cells(space, points), workers):
        worst["perturbation"] = max(worst["perturbation"], drift)
        worst["bump_radius"] = max(worst["bump_radius"], radius)
        worst["metric_scale"] = max(worst["metric_scale"], metric)
        LOGGER.debug(
            "welldefined: Q%d P=%s drift %.3e radius %.3e metric %.3e",
            cell.relation_index,
            format_scalar(cell.point),
            drift,
            radius,
            metric,
        )
        rows.append(_row("welldefined", backend, cell, image=image))
    tolerances = backend.tolerances
    status = PASS
    if worst["perturbation"] >= tolerances.welldefined or worst["bump_radius"] >= tolerances.welldefined:
        status = FAIL
    if worst["metric_scale"] >= tolerances.metric_scale:
        status = FAIL
    measured = {
        "relation_dimension": space.dimension,
        "max_drift": worst,
        "bump_radii": [backend.bump_radius, smaller.bump_radius],
        "metric_scales": [geometry.metric_scale, rescaled.geometry.metric_scale],
        "perturbation_radius": perturbation_radius,
    }
    return VerificationReport("welldefined", data, measured, status, rows=rows)


# -- closedness -----------------------------------------------------------------------


def closedness_identity(backend: P1Backend, relation: SymmetricTensor, m: int) -> Polynomial:
    """``Σ a_ST φ_S ∂φ_T`` as a polynomial; zero for every relation."""

    total = Polynomial()
    for outer, weight in section_weights(backend, relation, m).items():
        total = total + weight * backend.section_product(outer).derivative()
    return total


def _relation_degrees(degree: int) -> tuple[int, ...]:
    return (2, 3, 4) if degree <= 4 else (2, 3)


def verify_closedness(config: RunConfig, *, workers: int | None = None) -> VerificationReport:
    """``∂̄σ = 0`` before projection, and on P^1 the identity ``Σ a_ST φ_S ∂φ_T = 0``."""

    def build() -> VerificationReport:
        backend = make_backend(config)
        points = sample_points(config, backend)
        data = fixture(config, backend, points)
        space = relation_space(backend, 2)
        count = resolve_workers(workers or config.workers)
        measured: dict[str, Any] = {"relation_dimension": space.dimension}
        rows: list[ResultRow] = []
        status = PASS
        if isinstance(backend, P1Backend):
            checked, failed = 0, 0
            for k in _relation_degrees(backend.degree):
                higher = space if k == 2 else relation_space(backend, k)
                for index, relation in enumerate(higher.basis):
                    for m in range(1, k + 1):
                        checked += 1
                        if not closedness_identity(backend, relation, m).is_zero():
                            failed += 1
                            LOGGER.warning("closedness: identity fails for k=%d m=%d relation %d", k, m, index)
            measured.update(identity_checks=checked, identity_failures=failed)
            if failed:
                status = FAIL
        if not space.dimension and not isinstance(backend, P1Backend):
            return _empty("closedness", data, space)

        def task(cell: Cell) -> tuple[Cell, GaussImage]:
            return cell, gauss_rho(backend, cell.relation, backend.schiffer(cell.point, 1), strict=False)

        worst = 0.0
        for cell, image in map_cells(task, _cells(space, points), count):
            worst = max(worst, image.closedness_residual)
            rows.append(_row("closedness", backend, cell, image=image))
        measured["max_closedness"] = worst
        if worst >= backend.tolerances.closedness:
            status = FAIL
        return VerificationReport("closedness", data, measured, status, rows=rows)

    return _timed("closedness", build)


# -- symmetry, cross-path, derivative form ------------------------------------------


def verify_symmetry(config: RunConfig, *, workers: int | None = None) -> VerificationReport:
    """``pair(ξ, ρ_Q(η)) = pair(η, ρ_Q(ξ))`` for Schiffer classes at distinct points."""

    def build() -> VerificationReport:
        backend = make_backend(config)
        points = sample_points(config, backend)
        data = fixture(config, backend, points)
        space = relation_space(backend, 2)
        if not space.dimension:
            return _empty("symmetry", data, space)
        pairs = list(zip(points, points[1:]))
        cells = [(index, tensor, first, second) for index, tensor in enumerate(space.basis) for first, second in pairs]

        def task(item: tuple[int, SymmetricTensor, Any, Any]) -> tuple[int, Any, Scalar, Scalar]:
            index, tensor, first, second = item
            left, right = symmetry_pair(
                backend, tensor, backend.schiffer(first, 1), backend.schiffer(second, 1), strict=False
            )
            return index, first, left, right

        rows: list[ResultRow] = []
        worst = 0.0
        mismatches = 0
        for index, first, left, right in map_cells(task, cells, resolve_workers(workers or config.workers)):
            if backend.exact:
                same = left == right
                mismatches += not same
            else:
                scale = max(abs(left), abs(right))
                difference = abs(left - right) / scale if scale > 0 else 0.0
                worst = max(worst, difference)
                same = difference < backend.tolerances.symmetry
            rows.append(
                _row(
                    "symmetry",
                    backend,
                    Cell(index, space.basis[index], first),
                    numerator=left,
                    denominator=right,
                    status="ok" if same else "asymmetric",
                )
            )
        measured: dict[str, Any] = {"relation_dimension": space.dimension, "pairs": len(cells)}
        if backend.exact:
            measured["mismatches"] = mismatches
            status = PASS if not mismatches else FAIL
        else:
            measured["max_relative_difference"] = worst
            status = PASS if worst < backend.tolerances.symmetry else FAIL
        return VerificationReport("symmetry", data, measured, status, rows=rows)

    return _timed("symmetry", build)


def verify_cross_path(config: RunConfig, *, workers: int | None = None) -> VerificationReport:
    """The generic solver path against the closed form of ``ρ_Q(ξ_P)``."""

    def build() -> VerificationReport:
        backend = make_backend(config)
        points = sample_points(config, backend)
        data = fixture(config, backend, points)
        space = relation_space(backend, 2)
        if not space.dimension:
            return _empty("cross_path", data, space)

        def task(cell: Cell) -> tuple[Cell, GaussImage, GaussImage]:
            solver = gauss_rho(backend, cell.relation, backend.schiffer(cell.point, 1), strict=False)
            closed = backend.closed_form_rho(cell.relation, cell.point, strict=False)
            return cell, solver, closed

        rows: list[ResultRow] = []
        worst = 0.0
        worst_projection = 0.0
        for cell, solver, closed in map_cells(task, _cells(space, points), resolve_workers(workers or config.workers)):
            if backend.exact:
                distance = 0.0 if solver.coordinates == closed.coordinates else math.inf
            else:
                distance = solver.distance(closed)
            worst = max(worst, distance)
            worst_projection = max(worst_projection, closed.projection_residual)
            status = "ok" if distance < backend.tolerances.cross_path else "differs"
            rows.append(_row("cross_path", backend, cell, ratio=f"{distance:.3e}", image=solver, status=status))
        measured = {
            "relation_dimension": space.dimension,
            "max_distance": worst,
            "max_closed_form_projection": worst_projection,
        }
        status = PASS if worst < backend.tolerances.cross_path else FAIL
        return VerificationReport("cross_path", data, measured, status, rows=rows)

    return _timed("cross_path", build)


def verify_derivative_form(config: RunConfig, *, workers: int | None = None) -> VerificationReport:
    """``gauss_rho`` against its partial-derivative form for several ``(k, m)``."""

    def build() -> VerificationReport:
        backend = make_backend(config)
        points = sample_points(config, backend)
        data = fixture(config, backend, points, fixtures=[list(pair) for pair in DERIVATIVE_FIXTURES])
        torus = isinstance(backend, TorusBackend)
        tasks: list[tuple[int, int, Cell, Any]] = []
        dimensions: dict[str, int] = {}
        spaces: dict[int, RelationSpace] = {}
        for k, m in DERIVATIVE_FIXTURES:
            if k not in _relation_degrees(backend.degree) or (torus and k > 3):
                continue
            if k not in spaces:
                spaces[k] = relation_space(backend, k)
            space = spaces[k]
            dimensions[f"{k},{m}"] = space.dimension
            basis = space.basis[:2] if torus else space.basis
            chosen = points[:2] if torus else points
            for index, tensor in enumerate(basis):
                for point in chosen:
                    tasks.append((k, m, Cell(index, tensor, point), backend.schiffer(point, m)))
            if not torus and basis:
                span_size = m * backend.degree - 1
                if 1 <= span_size <= len(points):
                    coefficients = [from_int(c + 1) for c in range(span_size)]
                    xi = schiffer_span(backend, points[:span_size], coefficients, twist=m)
                    tasks.append((k, m, Cell(0, basis[0], points[0]), xi))
        if not tasks:
            LOGGER.warning("derivative_form: every relation space is zero")
            return VerificationReport("derivative_form", data, {"relation_dimensions": dimensions}, INCONCLUSIVE)

        def task(item: tuple[int, int, Cell, Any]) -> tuple[int, int, Cell, GaussImage, GaussImage]:
            k, m, cell, xi = item
            first = gauss_rho(backend, cell.relation, xi, m, strict=False)
            second = gauss_rho_derivative_form(backend, cell.relation, xi, m, strict=False)
            return k, m, cell, first, second

        rows: list[ResultRow] = []
        worst = 0.0
        for k, m, cell, first, second in map_cells(task, tasks, resolve_workers(workers or config.workers)):
            if backend.exact:
                distance = 0.0 if first.coordinates == second.coordinates else math.inf
            else:
                distance = first.distance(second)
            worst = max(worst, distance)
            LOGGER.debug("derivative_form: k=%d m=%d Q%d distance %.3e", k, m, cell.relation_index, distance)
            rows.append(
                _row(
                    "derivative_form",
                    backend,
                    cell,
                    ratio=f"{distance:.3e}",
                    image=first,
                    status=f"k={k} m={m}",
                )
            )
        measured = {"relation_dimensions": dimensions, "cells": len(tasks), "max_distance": worst}
        status = PASS if worst < backend.tolerances.cross_path else FAIL
        return VerificationReport("derivative_form", data, measured, status, rows=rows)

    return _timed("derivative_form", build)


# -- convergence --------------------------------------------------------------------


def _monotone(values: Sequence[float], floor: float) -> bool:
    return all(later <= earlier or later < floor for earlier, later in zip(values, values[1:]))


def _orders(grids: Sequence[int], values: Sequence[float], floor: float) -> list[float | None]:
    orders: list[float | None] = []
    for (n0, v0), (n1, v1) in zip(zip(grids, values), zip(grids[1:], values[1:])):
        if v0 < floor or v1 < floor:
            orders.append(None)
        else:
            orders.append(math.log(v0 / v1) / math.log(n1 / n0))
    return orders


CONVERGENCE_SERIES = ("spread", "closedness", "aliasing", "cross_path")
SPREAD_SHRINK = 4.0
SHRINK_GRID = 512


def _spread_shrink(table: Sequence[dict[str, Any]], floor: float) -> tuple[float | None, bool]:
    """``spread(N/2) / spread(N)`` at the finest grid once it reaches ``SHRINK_GRID``.

    Returns ``(None, True)`` when the table has no such pair.
    """

    spreads = {entry["grid"]: entry["spread"] for entry in table}
    finest = max(spreads)
    if finest < SHRINK_GRID or finest // 2 not in spreads:
        return None, True
    coarse, fine = spreads[finest // 2], spreads[finest]
    shrink = coarse / fine if fine > 0.0 else math.inf
    return shrink, fine < floor or shrink >= SPREAD_SHRINK


def _closed_form_distance(backend: TorusBackend) -> Callable[[tuple[Cell, GaussImage]], float]:
    def task(item: tuple[Cell, GaussImage]) -> float:
        cell, image = item
        return image.distance(backend.closed_form_rho(cell.relation, cell.point, strict=False))

    return task


def convergence_study(config: RunConfig, *, workers: int | None = None) -> VerificationReport:
    """Residuals and lifting-ratio spread against the grid size ``N``."""

    if config.backend != "torus":
        raise ConfigError("the convergence study needs the torus backend")
    grids = config.grids()
    if len(grids) < 2:
        raise ConfigError("the convergence study needs at least two grid sizes (e.g. --grid 64,128,256)")

    def build() -> VerificationReport:
        finest = torus_backend(config, grid=grids[-1])
        points = sample_points(config, finest)
        data = fixture(config, finest, points, grids=grids)
        space = relation_space(finest, 2)
        if not space.dimension:
            return _empty("convergence", data, space)
        count = resolve_workers(workers or config.workers)
        table: list[dict[str, Any]] = []
        rows: list[ResultRow] = []
        for n in grids:
            backend = finest if n == grids[-1] else torus_backend(config, grid=n)
            part, ratios, worst, images = _ratio_protocol("convergence", backend, space, points, count)
            rows.extend(part)
            distances = map_cells(_closed_form_distance(backend), images, count)
            entry = {
                "grid": n,
                "spread": _spread([complex(r) for r in ratios]) if ratios else math.inf,
                "closedness": worst["closedness"],
                "aliasing": worst["aliasing"],
                "cross_path": max(distances),
                "decomposition": worst["decomposition"],
            }
            LOGGER.info(
                "convergence N=%d: spread %.3e closedness %.3e aliasing %.3e cross-path %.3e",
                n,
                entry["spread"],
                entry["closedness"],
                entry["aliasing"],
                entry["cross_path"],
            )
            table.append(entry)
        floor = config.tolerances.convergence_floor
        monotone = {name: _monotone([e[name] for e in table], floor) for name in CONVERGENCE_SERIES}
        orders = {name: _orders(grids, [e[name] for e in table], floor) for name in CONVERGENCE_SERIES}
        shrink, shrinks = _spread_shrink(table, floor)
        measured = {"table": table, "monotone": monotone, "empirical_order": orders}
        if shrink is not None:
            table[-1]["spread_shrink"] = shrink
            measured["spread_shrink"] = shrink
            if not shrinks:
                LOGGER.warning(
                    "convergence: spread shrinks %.2fx from N=%d to N=%d, below %.0fx",
                    shrink,
                    grids[-1] // 2,
                    grids[-1],
                    SPREAD_SHRINK,
                )
        status = PASS if all(monotone.values()) and shrinks else FAIL
        return VerificationReport("convergence", data, measured, status, rows=rows)

    return _timed("convergence", build)


# -- suite selection ------------------------------------------------------------------

SUITES: dict[str, Callable[..., VerificationReport]] = {
    "lift": verify_lift,
    "twisted": verify_twisted_lift,
    "welldefined": verify_welldefined,
    "closedness": verify_closedness,
    "symmetry": verify_symmetry,
    "cross_path": verify_cross_path,
    "derivative_form": verify_derivative_form,
    "convergence": convergence_study,
}
P1_SUITES = ("lift", "welldefined", "closedness", "symmetry", "cross_path", "derivative_form")


def suites_for(config: RunConfig, selector: str) -> list[str]:
    if selector == "all":
        if config.backend == "p1":
            return list(P1_SUITES)
        names = [*P1_SUITES]
        if config.degree >= 4:
            names.append("twisted")
        if len(config.grid) >= 2:
            names.append("convergence")
        return names
    if selector not in SUITES:
        raise ConfigError(f"unknown suite {selector!r}; choose from all, {', '.join(SUITES)}")
    return [selector]


def run_suites(config: RunConfig, selector: str = "all", *, workers: int | None = None) -> list[VerificationReport]:
    reports = []
    for name in suites_for(config, selector):
        LOGGER.info("Running %s on %s (d=%d)", name, config.backend, config.degree)
        reports.append(SUITES[name](config, workers=workers))
    return reports


def overall_status(reports: Sequence[VerificationReport]) -> str:
    statuses = {report.status for report in reports}
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses or not reports:
        return INCONCLUSIVE
    return PASS


__all__ = [
    "FAIL",
    "INCONCLUSIVE",
    "PASS",
    "SUITES",
    "VerificationReport",
    "closedness_identity",
    "convergence_study",
    "focus_point",
    "make_backend",
    "overall_status",
    "run_suites",
    "suites_for",
    "verify_closedness",
    "verify_cross_path",
    "verify_derivative_form",
    "verify_lift",
    "verify_symmetry",
    "verify_twisted_lift",
    "verify_welldefined",
]
