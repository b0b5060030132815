from pathlib import Path

import pytest
import yaml

from hgmaps.exact import gaussian
from hgmaps.persistence import (
    SCHEMA_VERSION,
    ConfigError,
    RunConfig,
    load_config,
    load_reference,
    pin_reference,
    read_json,
    save_config,
    write_json,
)


def test_load_config_creates_defaults_when_missing(tmp_path: Path):
    config = load_config(tmp_path / "hgmaps.yaml")
    assert config.backend == "p1"
    assert config.degree == 2
    assert config.grid == [256]
    assert config.bump_radius == pytest.approx(0.15)
    assert config.workers is None


def test_save_and_reload_round_trip(tmp_path: Path):
    cfg_path = tmp_path / "hgmaps.yaml"
    config = RunConfig(backend="torus", degree=4, grid=[64, 128], tau="0.1+1.2i", seed=3)
    config.tolerances.ratio_spread = 1e-4
    save_config(config, cfg_path)
    reloaded = load_config(cfg_path)
    assert reloaded.backend == "torus"
    assert reloaded.grid == [64, 128]
    assert reloaded.tau == "0.1+1.2i"
    assert reloaded.seed == 3
    assert reloaded.tolerances.ratio_spread == pytest.approx(1e-4)


def test_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown configuration keys"):
        RunConfig.from_dict({"backend": "p1", "colour": "red"})
    with pytest.raises(ConfigError, match="tolerances"):
        RunConfig.from_dict({"tolerances": {"spread": 1.0}})


def test_from_dict_coerces_scalars():
    config = RunConfig.from_dict({"grid": 128, "points": [0, 2], "tau": 1})
    assert config.grid == [128]
    assert config.points == ["0", "2"]
    assert config.tau == "1"


def test_load_config_rejects_non_mapping(tmp_path: Path):
    cfg_path = tmp_path / "hgmaps.yaml"
    cfg_path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(cfg_path)


@pytest.mark.parametrize(
    ("overrides", "message"),
    [
        ({"backend": "sphere"}, "backend"),
        ({"k": 0}, "k must be"),
        ({"m": 3}, "m must satisfy"),
        ({"workers": 0}, "workers"),
        ({"points": ["0.5"]}, "exact rationals"),
        ({"source_split": "a,b"}, "source_split"),
        ({"backend": "torus", "tau": "1-1i"}, "Im τ"),
        ({"backend": "torus", "grid": [100]}, "power of two"),
        ({"backend": "torus", "character": [1.0, 0.0]}, "character"),
        ({"backend": "torus", "points": ["0.1+0.5i"]}, "chart boundary"),
        ({"backend": "torus", "degree": 0}, "degree"),
    ],
)
def test_validate_rejects_bad_configurations(overrides: dict, message: str):
    config = RunConfig(**overrides)
    with pytest.raises(ConfigError, match=message):
        config.validate()


def test_p1_pair_points_allow_none():
    config = RunConfig(points=["1", "none"])
    assert config.validate().pair_points(2) == [gaussian(1), None]
    with pytest.raises(ConfigError):
        config.pair_points(3)


def test_default_torus_points_use_lattice_coordinates():
    config = RunConfig(backend="torus", tau="0+1i", grid=[64])
    points = config.torus_points(config.geometry())
    assert points[0] == pytest.approx(0.45 + 0.48j)
    assert len(points) == 4


def test_packaged_reference_pins_one_half():
    assert load_reference()["lifting_constant"]["p1"] == "1/2"


def test_pin_reference_writes_once(tmp_path: Path):
    path = tmp_path / "reference.yaml"
    assert pin_reference("p1", "1/2", path)
    assert not pin_reference("p1", "1/3", path)
    assert yaml.safe_load(path.read_text(encoding="utf-8")) == {"lifting_constant": {"p1": "1/2"}}


def test_json_reports_carry_the_schema_version(tmp_path: Path):
    path = write_json({"command": "ik", "value": "ρ"}, tmp_path / "out" / "ik.json")
    document = read_json(path)
    assert document["schema_version"] == SCHEMA_VERSION
    assert document["value"] == "ρ"
    assert list(document)[0] == "schema_version"


def test_read_json_rejects_other_versions(tmp_path: Path):
    path = tmp_path / "old.json"
    path.write_text('{"schema_version": 0}', encoding="utf-8")
    with pytest.raises(ConfigError, match="schema_version"):
        read_json(path)
    with pytest.raises(ConfigError, match="does not exist"):
        read_json(tmp_path / "missing.json")
