"""Command-line interface.

Subcommands::

    opasim scan <scenario|custom> [--config FILE] [--out FILE]
                [--points N] [--span-gammas S]
    opasim selfcheck [--strict]
    opasim calibrate [--config FILE] [--out FILE]
    opasim fig2 --all --outdir DIR [--config FILE]
    opasim fig3 --all --outdir DIR [--config FILE]

Exit codes: 0 success, 1 validation error, 2 physics-domain error (threshold,
unreachable calibration target), 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys

from . import __version__
from .config import CALIBRATE, Config, load_config
from .csvio import write_scan_csv
from .errors import ConfigError, PhysicsError
from .scans import (FIG2_KINDS, FIG3_KINDS, NOISE, PRESET_KINDS, GridSpec,
                    Scenario, ScanResult, SystemParams, curve_features,
                    default_grid, run_scan)
from .selfcheck import run_selfcheck, system_from_config
from .source import calibrate_efficiency, opo_output_spectrum, squeezing_db


def _build_scenario(name: str, config: Config) -> Scenario:
    if name in PRESET_KINDS:
        return Scenario.preset(name)
    if name != "custom":
        raise ConfigError(f"unknown scenario: {name!r}")
    fraction = config["opa.pump_fraction"]
    return Scenario(
        kind="custom",
        pump_fraction=fraction,
        pump_on=fraction > 0.0,
        relative_phase=math.radians(config["opa.pump_phase_deg"]),
        lo_angle=config.lo_angle,
        sideband=config.sideband,
        observable=config["scan.observable"],
        input_state=config["scan.input"],
    )


def _resolve_grid(scenario: Scenario, config: Config, args) -> GridSpec:
    """Preset default, overridden by explicit config keys, then CLI flags."""
    grid = default_grid(scenario)
    span, points = grid.span_gammas, grid.points
    if "scan.span_gammas" not in config.defaulted:
        span = config["scan.span_gammas"]
    if "scan.points" not in config.defaulted:
        points = config["scan.points"]
    if getattr(args, "span_gammas", None) is not None:
        span = args.span_gammas
    if getattr(args, "points", None) is not None:
        points = args.points
    return GridSpec(span_gammas=span, points=points)


def _config_items_for(result_grid: GridSpec, config: Config,
                      eta) -> list[tuple[str, object]]:
    """Resolved configuration with the actually-used grid and efficiency."""
    items = []
    for key, value in config.resolved_items():
        if key == "scan.span_gammas":
            value = result_grid.span_gammas
        elif key == "scan.points":
            value = result_grid.points
        elif key == "detection.efficiency" and eta is not None:
            value = repr(eta)
        items.append((key, value))
    return items


def _summarize(result: ScanResult) -> str:
    try:
        feats = curve_features(result)
    except ValueError as exc:
        return f"summary unavailable ({exc})"
    fwhm = ("n/a" if feats.fwhm is None
            else f"{feats.fwhm / result.metadata['gamma_total']:.3f} gamma")
    return (f"center={feats.center_value:.6g} baseline={feats.baseline_value:.6g} "
            f"fwhm={fwhm} shoulders={len(feats.shoulder_positions)}")


def _run_and_write(scenario: Scenario, grid: GridSpec, config: Config,
                   out_path: str) -> str:
    needs_source = scenario.observable == NOISE and scenario.input_state != "vacuum"
    if needs_source:
        params = system_from_config(config)
        eta_used = params.eta
    else:
        params = SystemParams(opa_decays=config.decays("opa"))
        eta_used = None
    result = run_scan(scenario, grid, params)
    write_scan_csv(out_path, result, _config_items_for(grid, config, eta_used),
                   precision=config["output.precision"])
    return _summarize(result)


def cmd_scan(args) -> int:
    config = load_config(args.config)
    scenario = _build_scenario(args.scenario, config)
    grid = _resolve_grid(scenario, config, args)
    out_path = args.out or config["output.path"]
    summary = _run_and_write(scenario, grid, config, out_path)
    print(f"{scenario.kind}: {summary} -> {out_path}")
    return 0


def cmd_batch(args, kinds) -> int:
    config = load_config(args.config)
    os.makedirs(args.outdir, exist_ok=True)
    for kind in kinds:
        scenario = Scenario.preset(kind)
        grid = _resolve_grid(scenario, config, args)
        out_path = os.path.join(args.outdir, f"{kind}.csv")
        summary = _run_and_write(scenario, grid, config, out_path)
        print(f"{kind}: {summary} -> {out_path}")
    return 0


def cmd_calibrate(args) -> int:
    config = load_config(args.config)
    if config["detection.efficiency"] != CALIBRATE:
        raise ConfigError(
            "detection.efficiency must be set to 'calibrate' for this command")
    opo = config.opo_source()
    target = config["detection.target_squeezing_db"]
    eta = calibrate_efficiency(target, config.sideband, opo)
    source_db = squeezing_db(opo_output_spectrum(config.sideband, opo), 0.0)
    print(f"calibrated efficiency eta = {eta:.6f}")
    print(f"source squeezing at unit efficiency: {source_db:.3f} dB "
          f"(detected target {target:.3f} dB)")
    derived = dict(config.values)
    derived["detection.efficiency"] = repr(eta)
    text = "\n".join(f"{k} = {derived[k]}" for k, _ in config.resolved_items()) + "\n"
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote calibrated configuration -> {args.out}")
    return 0


def cmd_selfcheck(args) -> int:
    return run_selfcheck(strict=args.strict)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opasim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"opasim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="run one scenario and write a CSV")
    scan.add_argument("scenario", help=f"one of {', '.join(PRESET_KINDS)} or custom")
    scan.add_argument("--config", default=None, help="configuration file")
    scan.add_argument("--out", default=None, help="output CSV path")
    scan.add_argument("--points", type=int, default=None)
    scan.add_argument("--span-gammas", type=float, default=None)
    scan.set_defaults(func=cmd_scan)

    check = sub.add_parser("selfcheck", help="run the invariant suite")
    check.add_argument("--strict", action="store_true",
                       help="tighten the oracle comparison to 1e-12 "
                            "(demonstrates the 1e-4 default's rationale)")
    check.set_defaults(func=cmd_selfcheck)

    cal = sub.add_parser("calibrate", help="fit the lumped detection efficiency")
    cal.add_argument("--config", default=None)
    cal.add_argument("--out", default="calibrated.cfg",
                     help="path of the derived configuration file")
    cal.set_defaults(func=cmd_calibrate)

    for name, kinds in (("fig2", FIG2_KINDS), ("fig3", FIG3_KINDS)):
        batch = sub.add_parser(name, help=f"emit every {name} panel as CSV")
        batch.add_argument("--all", action="store_true", required=True)
        batch.add_argument("--outdir", required=True)
        batch.add_argument("--config", default=None)
        batch.add_argument("--points", type=int, default=None)
        batch.add_argument("--span-gammas", type=float, default=None)
        batch.set_defaults(func=lambda a, k=kinds: cmd_batch(a, k))

    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PhysicsError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
