"""Run configuration, the pinned reference constant and report files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .contract import Tolerances
from .exact.scalars import GaussianRational, parse_complex, parse_gaussian, parse_parts
from .pairs import SplitBundle
from .torus.geometry import TorusGeometry, default_points, is_power_of_two, lattice_point, required_margin

DEFAULT_CONFIG_PATH = Path("hgmaps.yaml")
REFERENCE_RESOURCE = "reference.yaml"
SCHEMA_VERSION = 1
BACKENDS = ("p1", "torus")
DEFAULT_P1_POINTS = ["0", "1", "-1", "2", "1/2", "-2"]
NO_POINT = "none"


class ConfigError(ValueError):
    """Raised when a run configuration violates a constraint."""


@dataclass(slots=True)
class RunConfig:
    """Everything a command needs to reproduce a computation."""

    backend: str = "p1"
    degree: int = 2
    k: int = 2
    m: int = 1
    tau: str = "0+1i"
    grid: list[int] = field(default_factory=lambda: [256])
    character: list[float] = field(default_factory=lambda: [0.0, 0.0])
    points: list[str] = field(default_factory=list)
    bump_radius: float = 0.15
    metric_scale: float = 1.0
    relation_index: int = 0
    point: str | None = None
    source_split: str = "2"
    target_split: str = "2"
    seed: int = 0
    workers: int | None = None
    output_dir: str = "out"
    record_timing: bool = False
    tolerances: Tolerances = field(default_factory=Tolerances)

    def to_dict(self) -> dict[str, Any]:
        """Serialize the config to primitive types for YAML dumping."""
        return {
            "backend": self.backend,
            "degree": self.degree,
            "k": self.k,
            "m": self.m,
            "tau": self.tau,
            "grid": list(self.grid),
            "character": list(self.character),
            "points": list(self.points),
            "bump_radius": self.bump_radius,
            "metric_scale": self.metric_scale,
            "relation_index": self.relation_index,
            "point": self.point,
            "source_split": self.source_split,
            "target_split": self.target_split,
            "seed": self.seed,
            "workers": self.workers,
            "output_dir": self.output_dir,
            "record_timing": self.record_timing,
            "tolerances": self.tolerances.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        values = dict(data)
        try:
            values["tolerances"] = Tolerances.from_dict(values.get("tolerances") or {})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"tolerances: {exc}") from exc
        grid = values.get("grid")
        if isinstance(grid, int):
            values["grid"] = [grid]
        points = values.get("points")
        if points is not None:
            values["points"] = [str(p) for p in points]
        if values.get("tau") is not None:
            values["tau"] = str(values["tau"])
        return cls(**values)

    # -- typed views ------------------------------------------------------

    def tau_value(self) -> complex:
        return parse_complex(self.tau)

    def character_value(self) -> tuple[float, float]:
        return (float(self.character[0]), float(self.character[1]))

    def grids(self) -> list[int]:
        return sorted(int(n) for n in self.grid)

    def p1_points(self) -> list[GaussianRational]:
        return [parse_gaussian(p) for p in (self.points or DEFAULT_P1_POINTS)]

    def pair_points(self, count: int) -> list[GaussianRational | None]:
        """One Schiffer point per summand; the literal ``none`` leaves a summand at zero."""

        literals = (self.points or DEFAULT_P1_POINTS)[:count]
        if len(literals) < count:
            raise ConfigError(f"the pair command needs {count} points (one per summand), got {len(literals)}")
        return [None if p.strip().lower() == NO_POINT else parse_gaussian(p) for p in literals]

    def torus_points(self, geometry: TorusGeometry) -> list[complex]:
        if self.points:
            return [parse_complex(p) for p in self.points]
        return [lattice_point(geometry, c) for c in default_points(4)]

    def geometry(self, grid: int | None = None) -> TorusGeometry:
        return TorusGeometry(self.tau_value(), grid or self.grids()[-1], self.metric_scale)

    # -- validation -------------------------------------------------------

    def validate(self) -> "RunConfig":
        """Check every constraint of the selected backend; raise :class:`ConfigError`."""

        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {', '.join(BACKENDS)}, got {self.backend!r}")
        if self.degree < 0:
            raise ConfigError(f"degree must be >= 0, got {self.degree}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if not 0 < self.m <= self.k:
            raise ConfigError(f"m must satisfy 0 < m <= k (k={self.k}), got {self.m}")
        if self.relation_index < 0:
            raise ConfigError(f"relation_index must be >= 0, got {self.relation_index}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.backend == "p1":
            self._validate_p1()
        else:
            self._validate_torus()
        return self

    def _validate_p1(self) -> None:
        for name, text in (("source_split", self.source_split), ("target_split", self.target_split)):
            try:
                SplitBundle.parse(text)
            except ValueError as exc:
                raise ConfigError(f"{name}: {exc}") from exc
        literals = list(self.points or DEFAULT_P1_POINTS)
        if self.point is not None:
            literals.append(self.point)
        for literal in literals:
            if literal.strip().lower() == NO_POINT:
                continue
            try:
                _, _, decimal = parse_parts(literal)
            except ValueError as exc:
                raise ConfigError(f"point {literal!r}: {exc}") from exc
            if decimal:
                raise ConfigError(f"P^1 points must be exact rationals (p/q), got {literal!r}")

    def _validate_torus(self) -> None:
        try:
            tau = self.tau_value()
        except ValueError as exc:
            raise ConfigError(f"tau: {exc}") from exc
        if tau.imag <= 0:
            raise ConfigError(f"tau must have Im τ > 0, got {self.tau!r}")
        if self.degree < 1:
            raise ConfigError(f"torus degree must be >= 1, got {self.degree}")
        if not self.grid:
            raise ConfigError("grid must list at least one resolution")
        for n in self.grid:
            if not is_power_of_two(int(n)) or int(n) < 8:
                raise ConfigError(f"grid N must be a power of two >= 8, got {n}")
        if len(self.character) != 2 or not all(0.0 <= float(c) < 1.0 for c in self.character):
            raise ConfigError(f"character χ must lie in [0,1)^2, got {self.character}")
        if self.metric_scale <= 0:
            raise ConfigError(f"metric_scale must be positive, got {self.metric_scale}")
        if self.bump_radius <= 0:
            raise ConfigError(f"bump_radius must be positive, got {self.bump_radius}")
        geometry = self.geometry()
        literals = list(self.points)
        if self.point is not None:
            literals.append(self.point)
        try:
            points = [parse_complex(p) for p in literals] or self.torus_points(geometry)
        except ValueError as exc:
            raise ConfigError(f"points: {exc}") from exc
        for point in points:
            margin = geometry.chart_margin(point)
            if margin <= required_margin(self.bump_radius):
                raise ConfigError(
                    f"point {point} is too close to the chart boundary: margin {margin:.3f} "
                    f"must exceed twice the bump radius ({required_margin(self.bump_radius):.3f})"
                )


def load_config(path: Path | None = None) -> RunConfig:
    """Load configuration from *path*; a missing file yields the defaults."""
    config_path = path or DEFAULT_CONFIG_PATH
    if not config_path.exists():
        return RunConfig()
    with config_path.open("r", encoding="utf-8") as handle:
        try:
            data = yaml.safe_load(handle) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{config_path}: invalid YAML ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{config_path}: top level must be a mapping")
    return RunConfig.from_dict(data)


def save_config(config: RunConfig, path: Path | None = None) -> None:
    """Persist *config* as YAML to *path*."""
    config_path = path or DEFAULT_CONFIG_PATH
    config_path.parent.mkdir(parents=True, exist_ok=True)
    with config_path.open("w", encoding="utf-8") as handle:
        yaml.safe_dump(config.to_dict(), handle, sort_keys=False)


def load_reference(path: Path | None = None) -> dict[str, Any]:
    """Pinned constants; defaults to the copy shipped inside the package."""

    if path is None:
        text = resources.files("hgmaps.data").joinpath(REFERENCE_RESOURCE).read_text(encoding="utf-8")
    elif path.exists():
        text = path.read_text(encoding="utf-8")
    else:
        return {}
    return yaml.safe_load(text) or {}


def pin_reference(key: str, value: str, path: Path) -> bool:
    """Record ``key: value`` in the reference file unless a value is already pinned."""

    data = load_reference(path)
    constants = data.setdefault("lifting_constant", {})
    if key in constants:
        return False
    constants[key] = value
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        yaml.safe_dump(data, handle, sort_keys=False)
    return True


def write_json(payload: dict[str, Any], path: Path) -> Path:
    """Write a report with a leading ``schema_version`` field."""

    document = {"schema_version": SCHEMA_VERSION, **payload}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise ConfigError(f"report file {path} does not exist")
    document = json.loads(path.read_text(encoding="utf-8"))
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{path}: unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    return document


__all__ = [
    "ConfigError",
    "DEFAULT_CONFIG_PATH",
    "RunConfig",
    "SCHEMA_VERSION",
    "load_config",
    "load_reference",
    "pin_reference",
    "read_json",
    "save_config",
    "write_json",
]
