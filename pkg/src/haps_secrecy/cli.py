"""Command-line front end.

Exit statuses: 0 success, 1 computation or verification failure, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .config import (
    PRESETS,
    ConfigError,
    RunConfig,
    apply_override,
    load_toml,
    parse_config,
    preset_raw,
)
from .sweep import (
    COMPUTE_COLUMNS,
    MC_COLUMNS,
    SWEEP_COLUMNS,
    TURBULENCE_COLUMNS,
    PointTask,
    curve_paths,
    iter_rows,
    partial_marker,
    render,
    write_metadata,
)
from .turbulence import GeometryError, turbulence_params

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep the message format
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="TOML configuration file")
    p.add_argument("--preset", choices=PRESETS, help="shipped figure configuration")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config value, e.g. --set fso.xi=1.1 (repeatable)")
    p.add_argument("--seed", type=int, help="Monte Carlo seed")
    p.add_argument("--samples", type=int, help="Monte Carlo sample count")
    p.add_argument("--output", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="haps-secrecy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("turbulence", help="Rytov variance and Gamma-Gamma severities from geometry")
    _common(p)

    p = sub.add_parser("compute", help="SOP or PPSC at a single operating point")
    p.add_argument("metric", choices=("sop", "ppsc"))
    _common(p)
    p.add_argument("--gamma-bar-db", type=float, help="per-hop average SNR in dB")

    p = sub.add_parser("sweep", help="SOP/PPSC over the configured per-hop SNR grid")
    _common(p)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("mc", help="Monte Carlo estimates only, over the sweep grid")
    _common(p)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--config", type=Path, help="accepted for symmetry; must exist if given")
    p.add_argument("--only", type=int, action="append", help="criterion number (repeatable)")
    p.add_argument("--samples", type=int, help="Monte Carlo samples for criteria 4 and 5")
    p.add_argument("--perturb-d", type=float, default=0.0,
                   help="relative perturbation of the FSO constant D in the closed form (test hook)")
    return parser


def resolve_config(args) -> RunConfig:
    if args.config and args.preset:
        raise UsageError("give either --config or --preset, not both")
    if args.config:
        if not args.config.is_file():
            raise UsageError(f"config file not found: {args.config}")
        raw = load_toml(args.config)
    elif args.preset:
        raw = preset_raw(args.preset)
    else:
        raw = {}
    for assignment in args.overrides:
        apply_override(raw, assignment)
    if args.seed is not None:
        apply_override(raw, f"mc.seed={args.seed}")
    if args.samples is not None:
        apply_override(raw, f"mc.samples={args.samples}")
    if args.format is not None:
        apply_override(raw, f'output.format="{args.format}"')
    if getattr(args, "gamma_bar_db", None) is not None:
        raw.setdefault("sweep", {})["gamma_bar_db"] = [args.gamma_bar_db]
    return parse_config(raw)


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def cmd_turbulence(args) -> int:
    cfg = resolve_config(args)
    try:
        tp = turbulence_params(cfg.geometry.to_geometry())
    except GeometryError as exc:
        raise ConfigError(f"geometry: {exc}") from None
    row = {"sigma_R2": tp.rytov_var, "alpha": tp.alpha, "beta": tp.beta}
    _emit(render([row], TURBULENCE_COLUMNS, cfg.output_format), args.output)
    return EXIT_OK


def _tasks(cfg: RunConfig, curve, metrics, methods) -> list[PointTask]:
    alpha, beta = cfg.turbulence()
    return [PointTask(cfg, curve, g, alpha, beta, methods, metrics) for g in cfg.gamma_bar_db]


def cmd_compute(args) -> int:
    cfg = resolve_config(args)
    curves = cfg.curves()
    if len(curves) != 1:
        raise UsageError(
            f"compute needs exactly one curve, the configuration defines {len(curves)}; "
            "narrow it with --set (e.g. --set eve.gamma_bar_db=12)"
        )
    if len(cfg.gamma_bar_db) != 1:
        raise UsageError("compute needs a single per-hop SNR; pass --gamma-bar-db")
    rows = list(iter_rows(_tasks(cfg, curves[0], (args.metric,), cfg.methods)))
    _emit(render(rows, COMPUTE_COLUMNS[args.metric], cfg.output_format), args.output)
    return EXIT_OK


def _run_curves(args, columns, methods) -> int:
    cfg = resolve_config(args)
    curves = cfg.curves()
    out = args.output or (Path(cfg.output_path) if cfg.output_path else None)
    if out is None:
        for curve in curves:
            if len(curves) > 1:
                sys.stdout.write(f"# curve: {curve.label}\n")
            rows = iter_rows(_tasks(cfg, curve, ("sop", "ppsc"), methods), args.workers)
            sys.stdout.write(render(rows, columns, cfg.output_format))
        return EXIT_OK
    out.parent.mkdir(parents=True, exist_ok=True)
    paths = curve_paths(out, curves)
    marker = partial_marker(out)
    if marker.exists():
        marker.unlink()
    for curve, path in zip(curves, paths):
        rows: list[dict] = []
        try:
            for row in iter_rows(_tasks(cfg, curve, ("sop", "ppsc"), methods), args.workers):
                rows.append(row)
        except Exception as exc:  # noqa: BLE001 - any numerical failure aborts the run
            path.write_text(render(rows, columns, cfg.output_format))
            marker.write_text(f"incomplete: failed in curve {curve.label}: {exc}\n")
            write_metadata(out, cfg, curves, paths, "partial", str(exc))
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        path.write_text(render(rows, columns, cfg.output_format))
    write_metadata(out, cfg, curves, paths, "complete")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    return _run_curves(args, SWEEP_COLUMNS, cfg.methods)


def cmd_mc(args) -> int:
    return _run_curves(args, MC_COLUMNS, ("mc",))


def cmd_verify(args) -> int:
    from .verification import FULL_MC_SAMPLES, run_criteria

    if args.config is not None and not args.config.is_file():
        raise UsageError(f"config file not found: {args.config}")
    results = run_criteria(
        args.only,
        mc_samples=args.samples or FULL_MC_SAMPLES,
        d_scale=1.0 + args.perturb_d,
    )
    for res in results:
        print(res.line())
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "turbulence": cmd_turbulence,
    "compute": cmd_compute,
    "sweep": cmd_sweep,
    "mc": cmd_mc,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
