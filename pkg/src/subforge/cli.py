"""Command-line front end: run the pipeline, export artifacts, list presets.

Exit codes: 0 every verification check passed, 2 some check failed,
1 configuration or resource error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import exports
from .pipeline import (
    EXIT_ERROR,
    ConfigError,
    RunConfig,
    run_pipeline,
)
from .presentation import PRESET_TEXTS, PresentationError


def _add_config_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESET_TEXTS), help="built-in presentation")
    src.add_argument("--file", help="presentation file path")
    p.add_argument("--radius", type=int, required=True, help="ball radius R")
    p.add_argument("--delta", type=float, default=None, help="override the thinness constant")
    p.add_argument("--delta-radius", type=int, default=None, help="triangle search radius (default R//2)")
    p.add_argument("--delta-mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--delta-samples", type=int, default=2000)
    p.add_argument("--horizon", type=int, default=None, help="witness search horizon (default R)")
    p.add_argument("--cap", type=int, default=5_000_000, help="element cap for enumeration")
    p.add_argument("--geodesic-cap", type=int, default=10_000)
    p.add_argument("--probe", type=int, default=2, help="cone-lemma probe depth")
    p.add_argument("--qi-samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--oracle", choices=["auto", "free", "dehn"], default="auto")
    p.add_argument("--cache-dir", default=None, help="binary ball cache directory")
    p.add_argument("--no-prefilter", action="store_true",
                   help="search all same-level pairs instead of the lemma-justified candidates")
    # fault-injection hooks used by the negative-control tests
    p.add_argument("--force-k", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--corrupt-vertex-label", action="store_true", help=argparse.SUPPRESS)


def _config_from(args: argparse.Namespace, out_dir, export_list) -> RunConfig:
    mode = "exhaustive-triangles" if args.delta_mode == "exhaustive" else "sampled-triangles"
    return RunConfig(
        preset=args.preset,
        file=args.file,
        radius=args.radius,
        delta_override=args.delta,
        delta_radius=args.delta_radius,
        delta_mode=mode,
        delta_samples=args.delta_samples,
        horizon=args.horizon,
        element_cap=args.cap,
        geodesic_cap=args.geodesic_cap,
        probe=args.probe,
        qi_samples=args.qi_samples,
        seed=args.seed,
        oracle=args.oracle,
        out_dir=out_dir,
        exports=tuple(export_list),
        cache_dir=args.cache_dir,
        prefilter=not args.no_prefilter,
        force_k=args.force_k,
        corrupt_vertex_label=args.corrupt_vertex_label,
    )


def _write(path: str, content: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(content)


def cmd_run(args: argparse.Namespace) -> int:
    formats = [f for f in (args.export or "").split(",") if f]
    for f in formats:
        if f not in exports.EXPORT_FORMATS:
            print(f"error: unknown export format {f!r}", file=sys.stderr)
            return EXIT_ERROR
    config = _config_from(args, args.out, formats)
    result = run_pipeline(config)
    out = args.out
    _write(os.path.join(out, "report.json"), exports.export_report(result.report))
    for fmt in formats:
        for what in exports.EXPORT_KINDS:
            try:
                content = exports.export_graph(result.artifacts, what, fmt)
            except exports.MissingArtifact:
                continue
            _write(os.path.join(out, f"{what}.{fmt}"), content)
    checks = result.report.get("checks", {})
    failed = sorted(name for name, ok in checks.items() if not ok)
    status = result.report.get("status", "completed")
    if status != "completed":
        print(f"status: {status} ({result.report.get('error', '')})")
    elif failed:
        print("FAILED checks: " + ", ".join(failed))
    else:
        print(f"all {len(checks)} checks passed")
    print(f"report: {os.path.join(out, 'report.json')}")
    return result.exit_code


def cmd_export(args: argparse.Namespace) -> int:
    config = _config_from(args, args.out, [args.format])
    result = run_pipeline(config)
    try:
        content = exports.export_graph(result.artifacts, args.what, args.format)
    except exports.MissingArtifact as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    path = os.path.join(args.out, f"{args.what}.{args.format}")
    _write(path, content)
    print(path)
    return 0


def cmd_presets(_: argparse.Namespace) -> int:
    for name in sorted(PRESET_TEXTS):
        text = PRESET_TEXTS[name].strip().replace("\n", "; ")
        print(f"{name}: {text}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subforge")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the full pipeline and write the report")
    _add_config_args(run_p)
    run_p.add_argument("--out", default="subforge-out", help="output directory")
    run_p.add_argument("--export", default="", help="comma-separated formats: dot,json")
    run_p.set_defaults(func=cmd_run)

    exp_p = sub.add_parser("export", help="run the pipeline and write one artifact")
    _add_config_args(exp_p)
    exp_p.add_argument("--out", default="subforge-out")
    exp_p.add_argument("--what", choices=exports.EXPORT_KINDS, required=True)
    exp_p.add_argument("--format", choices=exports.EXPORT_FORMATS, required=True)
    exp_p.set_defaults(func=cmd_export)

    pre_p = sub.add_parser("presets", help="list built-in presentations")
    pre_p.set_defaults(func=cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, PresentationError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
