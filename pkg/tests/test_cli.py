"""End-to-end tests of the ``hgmaps`` command line."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
import yaml

from hgmaps import verify
from hgmaps.cli import EXIT_FAIL, EXIT_INVALID, EXIT_OK, main
from hgmaps.persistence import RunConfig


def _load(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def test_ik_reports_dimension(tmp_path: Path) -> None:
    assert main(["ik", "--degree", "3", "--output-dir", str(tmp_path)]) == EXIT_OK
    document = _load(tmp_path / "ik.json")
    assert document["schema_version"] == 1
    assert document["command"] == "ik"
    assert document["relations"]["dimension"] == 3
    assert document["relations"]["provenance"]["rank"] == 7


def test_ik_of_a_line_is_empty(tmp_path: Path) -> None:
    assert main(["ik", "--degree", "1", "--output-dir", str(tmp_path)]) == EXIT_OK
    assert _load(tmp_path / "ik.json")["relations"]["dimension"] == 0


def test_rho_prints_the_image(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code = main(["rho", "--degree", "2", "--point", "1/2", "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    document = _load(tmp_path / "rho.json")
    assert document["point"] == "1/2"
    assert document["image"]["coordinates"] == ["1/2"]
    assert "[1/2]" in capsys.readouterr().out


def test_rho_on_an_empty_relation_space_is_invalid(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code = main(["rho", "--degree", "1", "--output-dir", str(tmp_path)])
    assert code == EXIT_INVALID
    assert "[hgmaps] relation space is zero" in capsys.readouterr().err


def test_wahl_values(tmp_path: Path) -> None:
    assert main(["wahl", "--degree", "2", "--points", "0,3", "--output-dir", str(tmp_path)]) == EXIT_OK
    document = _load(tmp_path / "wahl.json")
    assert document["values"] == {"0": "1", "3": "1"}


def test_pair_command(tmp_path: Path) -> None:
    args = ["pair", "--source", "2,2", "--target", "2", "--points", "1,none", "--output-dir", str(tmp_path)]
    assert main(args) == EXIT_OK
    document = _load(tmp_path / "pair.json")
    assert document["relations"]["dimension"] == 2
    assert document["points"] == ["1", "none"]
    assert len(document["image"]["components"]) == 1


def test_verify_lift_passes_and_pins(tmp_path: Path) -> None:
    pinned = tmp_path / "reference.yaml"
    args = ["verify", "--suite", "lift", "--degree", "3", "--output-dir", str(tmp_path), "--pin-reference", str(pinned)]
    assert main(args) == EXIT_OK
    document = _load(tmp_path / "verify.json")
    assert document["status"] == "PASS"
    assert document["reports"][0]["measured"]["constant"] == "1/2"
    assert "wall_time" not in document["reports"][0]
    assert yaml.safe_load(pinned.read_text(encoding="utf-8")) == {"lifting_constant": {"p1": "1/2"}}


def test_verify_failure_exit_code(tmp_path: Path) -> None:
    config = tmp_path / "hgmaps.yaml"
    config.write_text(yaml.safe_dump({"degree": 2, "output_dir": str(tmp_path)}), encoding="utf-8")
    code = main(["verify", "--suite", "cross_path", "--config", str(config), "--tolerance", "cross_path=-1"])
    assert code == EXIT_FAIL
    assert _load(tmp_path / "verify.json")["status"] == "FAIL"


def test_verify_records_timing_on_request(tmp_path: Path) -> None:
    args = ["verify", "--suite", "symmetry", "--degree", "3", "--record-timing", "--output-dir", str(tmp_path)]
    assert main(args) == EXIT_OK
    assert "wall_time" in _load(tmp_path / "verify.json")["reports"][0]


def test_convergence_suite_defaults_to_the_torus(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    seen: list[RunConfig] = []

    def study(config: RunConfig, *, workers: int | None = None) -> verify.VerificationReport:
        seen.append(config)
        return verify.VerificationReport("convergence", {}, {}, verify.PASS)

    monkeypatch.setitem(verify.SUITES, "convergence", study)
    args = ["verify", "--suite", "convergence", "--grid", "64,128,256", "--output-dir", str(tmp_path)]
    assert main(args) == EXIT_OK
    assert (seen[0].backend, seen[0].degree, seen[0].grid) == ("torus", 4, [64, 128, 256])


@pytest.mark.parametrize(
    "args",
    [
        ["ik", "--config", "does-not-exist.yaml"],
        ["rho", "--point", "0.5"],
        ["ik", "--tolerance", "nonsense=1"],
        ["ik", "--backend", "torus", "--grid", "100"],
        ["pair", "--backend", "torus", "--degree", "4"],
        ["verify", "--suite", "convergence", "--backend", "p1", "--grid", "64,128"],
    ],
)
def test_invalid_input_exits_with_one(
    tmp_path: Path, capsys: pytest.CaptureFixture[str], args: list[str]
) -> None:
    assert main([*args, "--output-dir", str(tmp_path)]) == EXIT_INVALID
    assert capsys.readouterr().err.startswith("[hgmaps] ")


def test_report_replays_verify_status(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["verify", "--suite", "lift", "--output-dir", str(tmp_path)]) == EXIT_OK
    capsys.readouterr()
    assert main(["report", str(tmp_path / "verify.json")]) == EXIT_OK
    assert "lift" in capsys.readouterr().out
    assert main(["report", str(tmp_path / "missing.json")]) == EXIT_INVALID
