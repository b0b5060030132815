"""Command-line entry point: ``hgmaps ik|wahl|rho|pair|verify|report``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from rich.console import Console
from rich.table import Table

from .contract import BackendError
from .exact.scalars import format_scalar
from .gauss import gauss_rho, wahl_mu2
from .logging import configure_logging, open_csv
from .pairs import SplitBundle, pair_relation_space, rho_pair, schiffer_components
from .persistence import ConfigError, RunConfig, load_config, pin_reference, read_json, write_json
from .relations import RelationSpaceEmptyError, relation_space
from .verify import FAIL, INCONCLUSIVE, PASS, focus_point, make_backend, overall_status, run_suites, sample_points

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAIL = 2
EXIT_INCONCLUSIVE = 3

STATUS_EXIT = {PASS: EXIT_OK, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}
SUITE_CHOICES = (
    "all",
    "lift",
    "twisted",
    "welldefined",
    "closedness",
    "symmetry",
    "cross_path",
    "derivative_form",
    "convergence",
)


def _split(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _tolerance_override(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"tolerance override {text!r} must look like NAME=VALUE")
    try:
        return key.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"tolerance {key!r} needs a number, got {value!r}") from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="YAML run configuration (flags override it)")
    parser.add_argument("--backend", choices=("p1", "torus"))
    parser.add_argument("--degree", type=int, help="degree d of L")
    parser.add_argument("--k", type=int, help="relation degree k")
    parser.add_argument("--m", type=int, help="twist m of the Schiffer class")
    parser.add_argument("--tau", help="torus modulus as a complex literal, e.g. 0+1i")
    parser.add_argument("--grid", help="grid sizes N, comma separated (powers of two)")
    parser.add_argument("--character", help="flat character χ1,χ2 in [0,1)")
    parser.add_argument("--points", help="sample points, comma separated complex literals")
    parser.add_argument("--point", help="Schiffer point for rho")
    parser.add_argument("--relation-index", type=int, help="index of Q in the relation basis")
    parser.add_argument("--bump-radius", type=float)
    parser.add_argument("--metric-scale", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int, help="parallel verification cells (else HGMAPS_WORKERS)")
    parser.add_argument("--output-dir", help="directory for JSON and CSV reports")
    parser.add_argument("--record-timing", action="store_true", default=None, help="serialise wall times")
    parser.add_argument(
        "--tolerance",
        action="append",
        type=_tolerance_override,
        default=[],
        metavar="NAME=VALUE",
        help="override one tolerance (repeatable)",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < YAML file < flags, then validated."""

    if args.config is not None and not args.config.exists():
        raise ConfigError(f"config file {args.config} does not exist")
    config = load_config(args.config) if args.config is not None else RunConfig()
    simple = {
        "backend": args.backend,
        "degree": args.degree,
        "k": args.k,
        "m": args.m,
        "tau": args.tau,
        "point": args.point,
        "relation_index": args.relation_index,
        "bump_radius": args.bump_radius,
        "metric_scale": args.metric_scale,
        "seed": args.seed,
        "workers": args.workers,
        "output_dir": args.output_dir,
        "record_timing": args.record_timing,
    }
    for name, value in simple.items():
        if value is not None:
            setattr(config, name, value)
    if args.grid is not None:
        try:
            config.grid = [int(n) for n in _split(args.grid)]
        except ValueError as exc:
            raise ConfigError(f"grid must be comma-separated integers, got {args.grid!r}") from exc
    if args.character is not None:
        try:
            config.character = [float(c) for c in _split(args.character)]
        except ValueError as exc:
            raise ConfigError(f"character must be two comma-separated numbers, got {args.character!r}") from exc
    if args.points is not None:
        config.points = _split(args.points)
    for name in ("source", "target"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(config, f"{name}_split", value)
    for key, value in args.tolerance:
        if not hasattr(config.tolerances, key):
            raise ConfigError(f"unknown tolerance {key!r}")
        setattr(config.tolerances, key, value)
    return config.validate()


def _output(config: RunConfig, name: str) -> Path:
    return Path(config.output_dir) / name


# -- commands -------------------------------------------------------------------


def cmd_ik(args: argparse.Namespace, console: Console) -> int:
    config = resolve_config(args)
    backend = make_backend(config)
    space = relation_space(backend, config.k)
    payload = {"command": "ik", "config": config.to_dict(), "relations": space.to_dict()}
    path = write_json(payload, _output(config, "ik.json"))
    table = Table(title=f"I_{config.k}(L) on {config.backend}, d = {config.degree}")
    for column in ("dimension", "rows", "cols", "rank", "gap"):
        table.add_column(column, justify="right")
    provenance = space.provenance
    table.add_row(
        str(space.dimension),
        str(provenance["rows"]),
        str(provenance["cols"]),
        str(provenance["rank"]),
        f"{provenance['gap']:.3e}",
    )
    console.print(table)
    for index, tensor in enumerate(space.basis):
        console.print(f"Q{index} = {tensor}")
    LOGGER.info("Wrote %s", path)
    return EXIT_OK


def cmd_wahl(args: argparse.Namespace, console: Console) -> int:
    config = resolve_config(args)
    backend = make_backend(config)
    relation = relation_space(backend, 2).element(config.relation_index)
    image = wahl_mu2(backend, relation)
    points = sample_points(config, backend)
    values = {format_scalar(p): format_scalar(backend.evaluate_wahl(image, p)) for p in points}
    payload = {
        "command": "wahl",
        "config": config.to_dict(),
        "relation": relation.to_dict(),
        "mu2": image.to_dict(),
        "values": values,
    }
    path = write_json(payload, _output(config, "wahl.json"))
    table = Table(title=f"μ2(Q{config.relation_index}) at the sample points")
    table.add_column("P")
    table.add_column("v_P(μ2(Q))", justify="right")
    for point, value in values.items():
        table.add_row(point, value)
    console.print(table)
    LOGGER.info("Wrote %s", path)
    return EXIT_OK


def cmd_rho(args: argparse.Namespace, console: Console) -> int:
    config = resolve_config(args)
    backend = make_backend(config)
    relation = relation_space(backend, config.k).element(config.relation_index)
    point = focus_point(config, backend)
    image = gauss_rho(backend, relation, backend.schiffer(point, config.m), config.m)
    payload = {
        "command": "rho",
        "config": config.to_dict(),
        "relation": relation.to_dict(),
        "point": format_scalar(point),
        "image": image.to_dict(),
    }
    path = write_json(payload, _output(config, "rho.json"))
    coordinates = ", ".join(format_scalar(c) for c in image.coordinates)
    console.print(f"ρ_Q{config.relation_index}(ξ_{format_scalar(point)}) = [{coordinates}]")
    if not image.exact:
        console.print(
            f"closedness {image.closedness_residual:.3e}  projection {image.projection_residual:.3e}  "
            f"decomposition {image.decomposition_residual:.3e}"
        )
    LOGGER.info("Wrote %s", path)
    return EXIT_OK


def cmd_pair(args: argparse.Namespace, console: Console) -> int:
    config = resolve_config(args)
    if config.backend != "p1":
        raise ConfigError("the pair command needs the p1 backend")
    source = SplitBundle.parse(config.source_split)
    target = SplitBundle.parse(config.target_split)
    space = pair_relation_space(source, target)
    payload: dict[str, Any] = {"command": "pair", "config": config.to_dict(), "relations": space.to_dict()}
    console.print(f"R_2({source}, {target}): dimension {space.dimension} (jet rank {space.rank})")
    if space.basis:
        if not 0 <= config.relation_index < space.dimension:
            raise ValueError(f"relation index {config.relation_index} outside 0..{space.dimension - 1}")
        tensor = space.basis[config.relation_index]
        points = config.pair_points(len(source.degrees))
        image = rho_pair(tensor, schiffer_components(source, points))
        payload["points"] = ["none" if p is None else format_scalar(p) for p in points]
        payload["image"] = image.to_dict()
        for index, component in enumerate(image.components):
            coordinates = ", ".join(format_scalar(c) for c in component.coordinates)
            console.print(f"component O({target.degrees[index]}): [{coordinates}]")
    path = write_json(payload, _output(config, "pair.json"))
    LOGGER.info("Wrote %s", path)
    return EXIT_OK


def _convergence_defaults(args: argparse.Namespace, config: RunConfig) -> RunConfig:
    """The convergence study runs on the torus: pick it, at d = 4, unless a backend was given."""

    if args.backend is not None or config.backend == "torus":
        return config
    LOGGER.info("convergence: no backend given; using the torus backend")
    config.backend = "torus"
    if args.degree is None and config.degree < 4:
        config.degree = 4
    return config.validate()


def cmd_verify(args: argparse.Namespace, console: Console) -> int:
    config = resolve_config(args)
    if args.suite == "convergence":
        config = _convergence_defaults(args, config)
    reports = run_suites(config, args.suite, workers=config.workers)
    status = overall_status(reports)
    payload = {
        "command": "verify",
        "suite": args.suite,
        "status": status,
        "config": config.to_dict(),
        "reports": [report.to_dict(config.record_timing) for report in reports],
    }
    path = write_json(payload, _output(config, "verify.json"))
    csv_path = _output(config, "verify.csv")
    csv_path.unlink(missing_ok=True)
    with open_csv(csv_path) as writer:
        for report in reports:
            writer.write_rows(report.rows)
    _print_reports(console, payload)
    if args.pin_reference is not None and config.backend == "p1":
        for report in reports:
            if report.check == "lift" and report.passed:
                if pin_reference("p1", report.measured["constant"], args.pin_reference):
                    LOGGER.info("Pinned lifting constant %s in %s", report.measured["constant"], args.pin_reference)
    LOGGER.info("Wrote %s and %s", path, csv_path)
    return STATUS_EXIT[status]


def _print_reports(console: Console, payload: dict[str, Any]) -> None:
    table = Table(title=f"verify ({payload.get('suite', 'all')}): {payload.get('status', '?')}")
    table.add_column("check")
    table.add_column("status")
    table.add_column("cells", justify="right")
    table.add_column("measured")
    for report in payload.get("reports", []):
        measured = report.get("measured", {})
        summary = ", ".join(f"{key}={value}" for key, value in measured.items() if not isinstance(value, (dict, list)))
        table.add_row(report["check"], report["status"], str(report.get("cells", "")), summary)
    console.print(table)


def cmd_report(args: argparse.Namespace, console: Console) -> int:
    document = read_json(args.path)
    command = document.get("command", "?")
    if command == "verify":
        _print_reports(console, document)
        return STATUS_EXIT.get(document.get("status", PASS), EXIT_OK)
    table = Table(title=f"{args.path} ({command})")
    table.add_column("key")
    table.add_column("value")
    for key, value in document.items():
        if key == "config":
            continue
        table.add_row(key, str(value))
    console.print(table)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hgmaps", description="Hodge–Gaussian maps on curves.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    ik = subparsers.add_parser("ik", help="relation space I_k(L)")
    _add_common(ik)
    ik.set_defaults(func=cmd_ik)

    wahl = subparsers.add_parser("wahl", help="second Gaussian map μ2 of a quadric")
    _add_common(wahl)
    wahl.set_defaults(func=cmd_wahl)

    rho = subparsers.add_parser("rho", help="Hodge–Gaussian map of a relation on a Schiffer class")
    _add_common(rho)
    rho.set_defaults(func=cmd_rho)

    pair = subparsers.add_parser("pair", help="R_2(E, F) and ρ on split bundles of P^1")
    _add_common(pair)
    pair.add_argument("--source", help="split type of E, e.g. 2,1")
    pair.add_argument("--target", help="split type of F, e.g. 2")
    pair.set_defaults(func=cmd_pair)

    verify = subparsers.add_parser("verify", help="run verification suites")
    _add_common(verify)
    verify.add_argument("--suite", choices=SUITE_CHOICES, default="all")
    verify.add_argument("--pin-reference", type=Path, help="record the measured P^1 constant here if absent")
    verify.set_defaults(func=cmd_verify)

    report = subparsers.add_parser("report", help="pretty-print a JSON report")
    report.add_argument("path", type=Path)
    report.add_argument("--verbose", action="store_true")
    report.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    console = Console()
    command: Callable[[argparse.Namespace, Console], int] = args.func
    try:
        return command(args, console)
    except (ValueError, RelationSpaceEmptyError) as exc:
        print(f"[hgmaps] {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BackendError as exc:
        print(f"[hgmaps] {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
