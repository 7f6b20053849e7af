"""Command-line interface.

Exit codes are fixed for scripting: 0 success, 1 input error (parse,
missing file, bad reference), 2 classification failure, 3 scene schema
mismatch, 64 usage or configuration error.  stdout carries only
machine-readable payloads; everything else goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, render
from .config import EngineConfig, apply_overrides, resolve_config
from .errors import (
    CannotClose,
    CerebroError,
    ConfigError,
    InvariantViolation,
    SchemaMismatch,
    SeverityOutOfRange,
    SwcError,
    UnknownEdge,
    UnknownLabel,
)
from .flow import compute_flow
from .swc import parse_swc, serialize_swc
from .vessel import parse_label_overrides, validate_network

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CLASSIFY = 2
EXIT_SCHEMA = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cerebro", description="Cerebral artery network layout engine")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a single config key (repeatable; wins over file and env)",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("layout", parents=[common], help="SWC scan to scene JSON")
    p.add_argument("input")
    p.add_argument("--labels", help="label override file")
    p.add_argument("--out", required=True)

    p = sub.add_parser("render", parents=[common], help="scene JSON to SVG")
    p.add_argument("scene")
    p.add_argument("--color", choices=["categorical", "flow", "bw"], default="categorical")
    p.add_argument("--legend", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("flow", parents=[common], help="SWC scan to scene JSON with blood-flow values")
    p.add_argument("input")
    p.add_argument("--block", help="edge id or artery label to occlude")
    p.add_argument("--out", required=True)

    p = sub.add_parser("inject", parents=[common], help="narrow one artery and write the modified SWC")
    p.add_argument("input")
    p.add_argument("--edge", required=True, type=int)
    p.add_argument("--severity", required=True, type=float)
    p.add_argument("--out", required=True)

    p = sub.add_parser("metrics", parents=[common], help="left/right symmetry metrics as JSON")
    p.add_argument("input")
    p.add_argument("--out")

    p = sub.add_parser("validate", parents=[common], help="robustness-check every scan in a directory")
    p.add_argument("directory")
    p.add_argument("--out")

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic scan")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out", help="also write ground-truth labels (override format)")
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--ablate", action="append", default=[], metavar="LABEL")
    return parser


def _resolve(args) -> EngineConfig:
    file_text = None
    if args.config:
        file_text = Path(args.config).read_text()
    config = resolve_config(file_text=file_text)
    flag_overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        flag_overrides[key.strip()] = value.strip()
    if flag_overrides:
        config = apply_overrides(config, flag_overrides)
    return config


def _read_forest(path: str):
    return parse_swc(Path(path).read_text())


def _emit(payload: str, out: str | None):
    if out:
        Path(out).write_text(payload)
    else:
        sys.stdout.write(payload)


def _cmd_layout(args, config: EngineConfig) -> int:
    forest = _read_forest(args.input)
    overrides = None
    if args.labels:
        overrides = parse_label_overrides(Path(args.labels).read_text())
    network, scene = analysis.process_scan(
        forest, config, scan_id=Path(args.input).stem, overrides=overrides
    )
    if network.classification_errors and not overrides:
        for err in network.classification_errors:
            print(f"cerebro: {args.input}: {err}", file=sys.stderr)
        return EXIT_CLASSIFY
    problems = validate_network(network)
    if problems:
        for problem in problems:
            print(f"cerebro: {args.input}: {problem}", file=sys.stderr)
        return EXIT_CLASSIFY
    scene = render.colorize_scene(scene, mode=render.MODE_CATEGORICAL)
    _emit(render.export_scene_json(scene), args.out)
    return EXIT_OK


def _cmd_render(args, config: EngineConfig) -> int:
    scene = render.scene_from_json(Path(args.scene).read_text())
    mode = {"categorical": render.MODE_CATEGORICAL, "flow": render.MODE_FLOW, "bw": render.MODE_BLACKWHITE}[args.color]
    if mode == render.MODE_FLOW and not any(ep.flow is not None for ep in scene.edge_paths):
        print("cerebro: scene has no flow values; falling back to categorical", file=sys.stderr)
        mode = render.MODE_CATEGORICAL
    scene = render.colorize_scene(scene, mode=mode)
    _emit(render.render_svg(scene, legend=args.legend), args.out)
    return EXIT_OK


def _resolve_block(network, spec: str) -> int:
    try:
        edge_id = int(spec)
    except ValueError:
        label = spec
        candidates = [e for e, lab in network.labels.items() if lab == label]
        if not candidates:
            raise UnknownEdge(spec) from None
        tree = network.cerebral_trees.get(label)
        if tree is not None and tree.edge_ids:
            return tree.edge_ids[0]
        return min(candidates)
    if edge_id not in network.graph.edges:
        raise UnknownEdge(edge_id)
    return edge_id


def _cmd_flow(args, config: EngineConfig) -> int:
    forest = _read_forest(args.input)
    network, _ = analysis.process_scan(forest, config, scan_id=Path(args.input).stem)
    blocked = set()
    if args.block:
        blocked.add(_resolve_block(network, args.block))
    flows = compute_flow(network, blocked, divisor=config.flow_divisor)
    from .layout import compose_scene

    scene = compose_scene(network, config, scan_id=Path(args.input).stem, flows=flows)
    scene = render.colorize_scene(scene, mode=render.MODE_FLOW)
    _emit(render.export_scene_json(scene), args.out)
    return EXIT_OK


def _cmd_inject(args, config: EngineConfig) -> int:
    forest = _read_forest(args.input)
    modified = analysis.inject_stenosis(forest, args.edge, args.severity)
    _emit(serialize_swc(modified), args.out)
    return EXIT_OK


def _cmd_metrics(args, config: EngineConfig) -> int:
    forest = _read_forest(args.input)
    network, _ = analysis.process_scan(forest, config, scan_id=Path(args.input).stem)
    report = analysis.symmetry_metrics(network)
    _emit(json.dumps(report.to_json_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_validate(args, config: EngineConfig) -> int:
    report = analysis.validate_batch(args.directory, config)
    _emit(report.to_json(), args.out)
    print(report.to_text(), file=sys.stderr, end="")
    return EXIT_OK if report.passed == report.total else EXIT_INPUT


def _cmd_gen(args, config: EngineConfig) -> int:
    params = analysis.GeneratorParams(
        symmetric=args.symmetric, ablate=frozenset(args.ablate)
    )
    forest, ground_truth = analysis.generate_synthetic_scan(args.seed, params)
    _emit(serialize_swc(forest, header=f"synthetic scan seed={args.seed}"), args.out)
    if args.labels_out:
        lines = [f"segment:{sid} = {label}" for sid, label in sorted(ground_truth.items())]
        Path(args.labels_out).write_text("\n".join(lines) + "\n")
    return EXIT_OK


_COMMANDS = {
    "layout": _cmd_layout,
    "render": _cmd_render,
    "flow": _cmd_flow,
    "inject": _cmd_inject,
    "metrics": _cmd_metrics,
    "validate": _cmd_validate,
    "gen": _cmd_gen,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        config = _resolve(args)
        return _COMMANDS[args.command](args, config)
    except (ConfigError, SeverityOutOfRange) as exc:
        print(f"cerebro: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaMismatch as exc:
        print(f"cerebro: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (CannotClose, InvariantViolation, UnknownLabel) as exc:
        print(f"cerebro: {exc}", file=sys.stderr)
        return EXIT_CLASSIFY
    except (SwcError, UnknownEdge, CerebroError) as exc:
        print(f"cerebro: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"cerebro: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
