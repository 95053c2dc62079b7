"""Command-line front end.

Subcommands:
  classify   verdict at a single surface point (--at)
  scan       verdicts over a parameter grid (--grid), json/csv/text reports
  locus      roots of the umbilical residual along a family parameter
  curvature  Gaussian curvature of the induced 2-metric at a point

Example:
  subshear scan --metric kerr --param m=1.0,a=0.5 --surface const-vr \\
      --sparam v=0,r=1.8660254 --grid theta=0.001:3.1406:64 --report csv
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, DomainError, NoRootError, SubshearError
from .scan import (
    ScanConfig,
    ScanResult,
    find_umbilical_locus,
    gaussian_curvature_2d,
    point_record,
    render,
    summarize,
)


def _parse_kv(text: str, cast=float) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        key, _, value = item.partition("=")
        try:
            out[key.strip()] = cast(value)
        except ValueError as exc:
            raise ConfigError(f"bad value in {item!r}: {exc}") from exc
    return out


def _parse_grid(text: str) -> dict:
    grid = {}
    for item in text.split(","):
        if not item:
            continue
        key, _, spec = item.partition("=")
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid axis {item!r} must be name=start:stop:count")
        try:
            grid[key.strip()] = (float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise ConfigError(f"bad grid axis {item!r}: {exc}") from exc
    if not grid:
        raise ConfigError("--grid needs at least one axis")
    return grid


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--metric", required=True, help="catalog metric name (e.g. kerr, euclidean4)")
    p.add_argument("--param", default="", help="metric parameters, e.g. m=1.0,a=0.5")
    p.add_argument("--surface", required=True, help="surface family (e.g. const-vr, round_sphere)")
    p.add_argument("--sparam", default="", help="surface parameters, e.g. v=0,r=1.866")
    p.add_argument("--tol", action="append", default=[], help="tolerance overrides key=value (repeatable)")
    p.add_argument("--report", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out", default=None, help="write the report to this path instead of stdout")
    p.add_argument("--orientation", choices=("+", "-"), default="+", help="normal area-form orientation")
    p.add_argument(
        "--mean-curvature-convention",
        choices=("paper", "physics"),
        default="paper",
        help="physics drops the 1/n factor (reported gHH scales by n^2)",
    )
    p.add_argument("--workers", type=int, default=1)


def _config_from(args, need_grid: bool) -> ScanConfig:
    tols = {}
    for chunk in args.tol:
        tols.update(_parse_kv(chunk))
    config = ScanConfig(
        metric=args.metric,
        metric_params=_parse_kv(args.param),
        surface=args.surface,
        surface_params=_parse_kv(args.sparam),
        grid=_parse_grid(args.grid) if need_grid else {},
        at=_parse_kv(getattr(args, "at", "") or ""),
        tol_overrides=tols,
        report=args.report,
        out=args.out,
        orientation=1 if args.orientation == "+" else -1,
        mean_curvature_convention=args.mean_curvature_convention,
        workers=args.workers,
    )
    return config.validate()


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subshear", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="classify a single surface point")
    _add_common(p_classify)
    p_classify.add_argument("--at", required=True, help="surface coordinates, e.g. theta=0.7,phi=0")

    p_scan = sub.add_parser("scan", help="classify a grid of surface points")
    _add_common(p_scan)
    p_scan.add_argument("--grid", required=True, help="axes name=start:stop:count[,name=...]")
    p_scan.add_argument("--at", default="", help="fixed coordinates for axes not on the grid")

    p_locus = sub.add_parser("locus", help="locate umbilical loci along a family parameter")
    _add_common(p_locus)
    p_locus.add_argument("--at", required=True, help="surface coordinates where the residual is evaluated")
    p_locus.add_argument("--free", required=True, help="surface parameter to scan (e.g. r)")
    p_locus.add_argument("--bracket", required=True, help="lo:hi bracket for the free parameter")
    p_locus.add_argument("--samples", type=int, default=64)

    p_curv = sub.add_parser("curvature", help="Gaussian curvature of the induced metric")
    _add_common(p_curv)
    p_curv.add_argument("--at", required=True, help="surface coordinates, e.g. theta=0.7,phi=0")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "scan":
            return _cmd_scan(args)
        if args.command == "locus":
            return _cmd_locus(args)
        if args.command == "curvature":
            return _cmd_curvature(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SubshearError as exc:
        print(f"error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 1


def _cmd_classify(args) -> int:
    config = _config_from(args, need_grid=False)
    metric, surface, _ = config.build()
    names = list(surface.param_names)
    try:
        coords = tuple(config.at[p] for p in surface.param_names)
    except KeyError as exc:
        raise ConfigError(f"--at is missing surface coordinate {exc}") from exc
    try:
        record = point_record(config, names, coords)
    except DomainError as exc:
        print(f"skipped: {exc}", file=sys.stderr)
        return 2
    result = ScanResult(config.echo(), [record], summarize([record], []), 0)
    _emit(render(result, config.report), config.out)
    return 0


def _cmd_scan(args) -> int:
    from .scan import run_scan

    config = _config_from(args, need_grid=True)
    result = run_scan(config)
    _emit(render(result, config.report), config.out)
    return result.exit_code


def _cmd_locus(args) -> int:
    config = _config_from(args, need_grid=False)
    parts = args.bracket.split(":")
    if len(parts) != 2:
        raise ConfigError(f"--bracket must be lo:hi, got {args.bracket!r}")
    bracket = (float(parts[0]), float(parts[1]))
    try:
        locus = find_umbilical_locus(config, args.free, bracket, args.samples)
    except NoRootError as exc:
        print(f"no root: {exc}", file=sys.stderr)
        return 2
    doc = {
        "config": config.echo(),
        "free": args.free,
        "bracket": list(bracket),
        "roots": locus.roots,
        "degenerate": locus.degenerate,
        "residuals": locus.residuals,
    }
    if config.report == "text":
        if locus.degenerate:
            text = "degenerate bracket: residual below threshold everywhere\n"
        else:
            text = "\n".join(f"root {args.free} = {r!r} (residual {e:.3e})" for r, e in zip(locus.roots, locus.residuals)) + "\n"
    else:
        text = json.dumps(doc, indent=2) + "\n"
    _emit(text, config.out)
    return 0


def _cmd_curvature(args) -> int:
    config = _config_from(args, need_grid=False)
    _, surface, _ = config.build()
    try:
        coords = tuple(config.at[p] for p in surface.param_names)
    except KeyError as exc:
        raise ConfigError(f"--at is missing surface coordinate {exc}") from exc
    try:
        value = gaussian_curvature_2d(config, coords)
    except DomainError as exc:
        print(f"skipped: {exc}", file=sys.stderr)
        return 2
    if config.report == "text":
        text = f"gaussian curvature at {dict(sorted(config.at.items()))}: {value!r}\n"
    else:
        text = json.dumps({"config": config.echo(), "point": dict(sorted(config.at.items())), "K": value}) + "\n"
    _emit(text, config.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
