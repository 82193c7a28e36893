"""Command-line front end.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 runtime failure.
Set ``ORBITFORGE_LOG`` (e.g. ``DEBUG``) to change the log level.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import montecarlo
from .kernel import SimulationError
from .scenario import (KINDS, ConfigError, PlotSpec, ScenarioError, build_scenario, emit_svg_plot,
                       export_csv, export_telemetry_jsonl, load_config_file, run_scenario,
                       with_parameter)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RUNTIME = 3

log = logging.getLogger("orbitforge")


def _load(path: str, stop_s=None, num_points=None):
    cfg = load_config_file(path)
    for w in cfg.warnings:
        log.warning("%s: %s", path, w)
    # overrides go back through validation
    if stop_s is not None:
        cfg = with_parameter(cfg, "simulation.simulation_time", float(stop_s))
    if num_points is not None:
        cfg = with_parameter(cfg, "simulation.num_data_points", num_points)
    return cfg


def plot_bundle(bundle, path) -> None:
    if "sigma_BR" in bundle:
        ys = {"|sigma_BR|": np.linalg.norm(bundle["sigma_BR"], axis=1)}
        spec = PlotSpec(title="Attitude tracking error", ylabel="|sigma_BR|")
    else:
        ys = {"|r| km": np.linalg.norm(bundle["r_BN_N"], axis=1) / 1000.0}
        spec = PlotSpec(title="Orbit radius", ylabel="radius [km]")
    emit_svg_plot(bundle.t_s, ys, path, spec)


def summary_line(inst, bundle) -> str:
    parts = [f"t_final={inst.final_time_s:.3f} s", f"samples={len(bundle)}"]
    if "sigma_BR" in bundle:
        parts.append(f"|sigma_BR|={np.linalg.norm(bundle['sigma_BR'][-1]):.3e}")
        parts.append(f"|omega_BR_B|={np.linalg.norm(bundle['omega_BR_B'][-1]):.3e}")
    return " ".join(parts)


def cmd_run(args) -> int:
    cfg = _load(args.config, args.stop_s, args.num_points)
    inst = build_scenario(cfg, args.kind)
    bundle = run_scenario(inst, mode=args.mode)
    if args.csv:
        export_csv(bundle, args.csv)
    if args.jsonl:
        export_telemetry_jsonl(bundle, args.jsonl)
    if args.plot:
        plot_bundle(bundle, args.plot)
    print(summary_line(inst, bundle))
    return EXIT_OK


def cmd_mc(args) -> int:
    cfg = _load(args.config)
    plan = montecarlo.McPlan(
        config=cfg, kind=args.kind, execution_count=args.runs,
        archive_dir=Path(args.archive), master_seed=args.seed,
        dispersions=[montecarlo.parse_dispersion(d) for d in args.disperse],
        workers=args.workers, mode=args.mode)

    def progress(entry):
        print(f"run_{entry['index']}: {entry['status']}")

    archive = montecarlo.execute_simulations(plan, force=args.force, progress=progress)
    failed = sum(1 for r in archive.runs if r["status"] != "success")
    print(f"manifest: {archive.path / montecarlo.MANIFEST} ({len(archive.runs)} runs, {failed} failed)")
    return EXIT_OK


def cmd_exec_order(args) -> int:
    cfg = _load(args.config)
    inst = build_scenario(cfg, args.kind)
    text = inst.show_execution_order()
    sys.stdout.write(text)
    if any(line.startswith("WARNING") for line in text.splitlines()):
        log.warning("orphan modules present; they will never update")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = load_config_file(args.config)
    except ConfigError as exc:
        for issue in exc.issues:
            print(f"invalid: {issue}")
        return EXIT_INVALID
    for w in cfg.warnings:
        print(f"warning: {w}")
    print(f"valid: {args.config}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbitforge", description="Modular spacecraft GN&C simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario from a YAML config")
    p.add_argument("config")
    p.add_argument("--kind", choices=KINDS, default="earthOrbit")
    p.add_argument("--mode", choices=("standby", "inertialPoint", "hillPoint"))
    p.add_argument("--stop-s", type=float, help="override simulation time [s]")
    p.add_argument("--num-points", type=int, help="number of recorded data points")
    p.add_argument("--csv", help="write time series CSV")
    p.add_argument("--jsonl", help="write JSON-lines telemetry")
    p.add_argument("--plot", help="write an SVG plot")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("mc", help="run a Monte Carlo ensemble")
    p.add_argument("config")
    p.add_argument("--kind", choices=KINDS, default="earthOrbit")
    p.add_argument("--mode", choices=("standby", "inertialPoint", "hillPoint"))
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--archive", default="monte_carlo_results")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--disperse", action="append", default=[], metavar="KIND:TARGET:PARAMS",
                   help="e.g. uniform:spacecraft.mass:700:800 or "
                        "normal_vector_cart:spacecraft.r_CN_N_init:1000")
    p.add_argument("--force", action="store_true", help="overwrite an existing archive")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("exec-order", help="print the process/task/module execution order")
    p.add_argument("config")
    p.add_argument("--kind", choices=KINDS, default="earthOrbit")
    p.set_defaults(func=cmd_exec_order)

    p = sub.add_parser("validate", help="validate a YAML config")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("ORBITFORGE_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for issue in exc.issues:
            print(f"error: {issue}", file=sys.stderr)
        return EXIT_INVALID
    except (montecarlo.ArchiveError, FileNotFoundError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SimulationError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
