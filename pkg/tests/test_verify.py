"""Tests for the verification suites."""

from __future__ import annotations

import math
from pathlib import Path

import pytest

from hgmaps.exact import parse_complex
from hgmaps.p1 import P1Backend
from hgmaps.persistence import ConfigError, RunConfig
from hgmaps.relations import relation_space
from hgmaps.torus import TorusBackend, TorusGeometry
from hgmaps.verify import (
    CONVERGENCE_SERIES,
    FAIL,
    INCONCLUSIVE,
    P1_SUITES,
    PASS,
    VerificationReport,
    _judge_lift,
    _monotone,
    _orders,
    _spread_shrink,
    convergence_study,
    overall_status,
    run_suites,
    suites_for,
    verify_closedness,
    verify_lift,
    verify_twisted_lift,
    verify_welldefined,
)


def test_p1_lift_matches_the_pinned_constant() -> None:
    report = verify_lift(RunConfig(backend="p1", degree=3).validate())
    assert report.status == PASS
    assert report.measured["constant"] == "1/2"
    assert report.measured["distinct_ratios"] == ["1/2"]
    assert report.measured["matches_reference"]
    assert report.wall_time > 0.0
    assert report.rows


def test_lift_fails_against_a_different_reference(tmp_path: Path) -> None:
    reference = tmp_path / "reference.yaml"
    reference.write_text('lifting_constant:\n  p1: "1/3"\n', encoding="utf-8")
    report = verify_lift(RunConfig(degree=2).validate(), reference_path=reference)
    assert report.status == FAIL
    assert report.measured["reference"] == "1/3"


def test_lift_without_reference_checks_constancy_only(tmp_path: Path) -> None:
    report = verify_lift(RunConfig(degree=2).validate(), reference_path=tmp_path / "missing.yaml")
    assert report.status == PASS
    assert "reference" not in report.measured


def test_zero_relation_space_is_inconclusive() -> None:
    report = verify_lift(RunConfig(degree=1).validate())
    assert report.status == INCONCLUSIVE
    assert report.measured == {"relation_dimension": 0}


def test_welldefined_reports_no_failures() -> None:
    report = verify_welldefined(RunConfig(degree=3, seed=7).validate(), workers=2)
    assert report.status == PASS
    assert report.measured["perturbation_failures"] == 0
    assert report.measured["basis_change_failures"] == 0


def test_closedness_suite_passes_on_p1() -> None:
    report = verify_closedness(RunConfig(degree=3).validate())
    assert report.status == PASS


def test_all_p1_suites_pass() -> None:
    reports = run_suites(RunConfig(degree=3, points=["0", "1", "-1", "1/2"]).validate())
    assert [report.check for report in reports] == list(P1_SUITES)
    assert {report.status for report in reports} == {PASS}
    assert overall_status(reports) == PASS


def test_suite_selection() -> None:
    assert suites_for(RunConfig(), "all") == list(P1_SUITES)
    torus = RunConfig(backend="torus", degree=4, grid=[64, 128])
    assert suites_for(torus, "all")[-2:] == ["twisted", "convergence"]
    assert "twisted" not in suites_for(RunConfig(backend="torus", degree=3), "all")
    assert suites_for(torus, "lift") == ["lift"]
    with pytest.raises(ConfigError):
        suites_for(torus, "bogus")


def test_overall_status_precedence() -> None:
    def report(status: str) -> VerificationReport:
        return VerificationReport("lift", {}, {}, status)

    assert overall_status([report(PASS), report(INCONCLUSIVE)]) == INCONCLUSIVE
    assert overall_status([report(INCONCLUSIVE), report(FAIL)]) == FAIL
    assert overall_status([]) == INCONCLUSIVE


def test_report_serialization_hides_wall_time_by_default() -> None:
    report = VerificationReport("lift", {"grid": 64}, {"spread": math.inf, "constant": 0.5 + 0j}, PASS, wall_time=1.5)
    data = report.to_dict()
    assert "wall_time" not in data
    assert data["measured"]["spread"] == "inf"
    assert isinstance(data["measured"]["constant"], str)
    assert report.to_dict(record_timing=True)["wall_time"] == 1.5


def test_convergence_helpers() -> None:
    floor = 1e-11
    assert _monotone([1e-3, 1e-5, 5e-12, 8e-12], floor)
    assert not _monotone([1e-3, 1e-2], floor)
    orders = _orders([64, 128, 256], [1e-4, 1e-6, 1e-12], floor)
    assert orders[0] == pytest.approx(math.log(100) / math.log(2))
    assert orders[1] is None


def test_twisted_suite_needs_the_torus() -> None:
    with pytest.raises(ConfigError):
        run_suites(RunConfig(degree=4), "twisted")


def test_convergence_study_tabulates_every_grid() -> None:
    config = RunConfig(backend="torus", degree=4, grid=[64, 128]).validate()
    report = convergence_study(config)
    table = report.measured["table"]
    assert [entry["grid"] for entry in table] == [64, 128]
    assert set(report.measured["monotone"]) == set(CONVERGENCE_SERIES)
    assert all(len(orders) == 1 for orders in report.measured["empirical_order"].values())
    assert report.status in (PASS, FAIL)
    assert report.fixture["grids"] == [64, 128]


def test_convergence_study_needs_two_grids() -> None:
    with pytest.raises(ConfigError, match="two grid sizes"):
        convergence_study(RunConfig(backend="torus", degree=4, grid=[64]).validate())


def test_twisted_lift_defaults_to_a_half_period_character() -> None:
    report = verify_twisted_lift(RunConfig(backend="torus", degree=4, grid=[128]).validate())
    assert report.fixture["character"] == [0.5, 0.0]
    assert report.measured["character_defaulted"]
    assert report.rows
    assert parse_complex(report.measured["constant"]) == pytest.approx(0.5, rel=1e-2)


def test_spread_shrink_needs_a_fourfold_drop_at_the_finest_grid() -> None:
    floor = 1e-11

    def table(*spreads: float) -> list[dict[str, float]]:
        return [{"grid": n, "spread": s} for n, s in zip((128, 256, 512), spreads)]

    assert _spread_shrink(table(1e-4, 1e-6, 1e-8), floor) == (pytest.approx(100.0), True)
    shrink, ok = _spread_shrink(table(1e-4, 1e-6, 5e-7), floor)
    assert shrink == pytest.approx(2.0)
    assert not ok
    assert _spread_shrink(table(1e-4, 1e-12, 1e-12), floor)[1]
    assert _spread_shrink([{"grid": 64, "spread": 1e-3}, {"grid": 128, "spread": 1e-3}], floor) == (None, True)


def test_lift_verdict_is_gated_on_sigma_residuals() -> None:
    backend = TorusBackend(TorusGeometry(1j, 16), 4)
    space = relation_space(P1Backend(2), 2)
    clean = {"decomposition": 0.0, "closedness": 1e-9, "projection": 1e-9, "aliasing": 0.0}
    report = _judge_lift(backend, {}, space, [], [0.5, 0.5], clean, None)
    assert report.status == PASS
    assert "degraded" not in report.measured
    open_form = dict(clean, closedness=0.094)
    report = _judge_lift(backend, {}, space, [], [0.5, 0.5], open_form, None)
    assert report.status == FAIL
    assert report.measured["degraded"] == ["closedness"]
    leaky = dict(clean, projection=1e-3)
    assert _judge_lift(backend, {}, space, [], [0.5, 0.5], leaky, None).measured["degraded"] == ["projection"]
