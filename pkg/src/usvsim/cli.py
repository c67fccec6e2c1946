"""Command-line front end.

Subcommands:

* ``run``           -- execute built-in or file-defined scenarios, write CSV
                       logs plus JSON summaries.
* ``compare``       -- compare two run logs of the same scenario and print
                       the per-phase error table with lambda percentages.
* ``fit``           -- system-identification fits (surge drag quadratic, tow
                       drag coefficient, thrust decay calibration).
* ``derive-coeffs`` -- print or export the derived hydrodynamic coefficient
                       table for a condition.

Exit codes: 0 success, 1 validation failure, 2 runtime/numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .analysis import compare_controllers, fit_drag_quadratic, fit_tow_drag, phase_metrics
from .configio import (
    coefficient_table,
    coefficient_table_csv,
    load_geometry,
    load_scenario,
    parse_duration,
)
from .dynamics import SimulationError
from .params import standard_condition
from .propulsion import DEFAULT_BOLLARD_TOTAL, calibrate_thrust_decay, calibrated_pump_model
from .runlog import LogFormatError, RunLog
from .sim import ValidationError, builtin_scenario, run_scenario, BUILTIN_SCENARIOS
from .version import __version__

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _error(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _build_spec(args, name: str):
    overrides = {}
    if args.duration is not None:
        overrides["duration"] = parse_duration(args.duration)
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.gamma is not None:
        overrides["gamma"] = args.gamma

    if name.endswith((".yaml", ".yml")):
        if args.controller is not None:
            overrides["controller"] = args.controller
        return load_scenario(name, **overrides)

    builder_kwargs = dict(overrides)
    if args.condition is not None:
        builder_kwargs["condition"] = args.condition
    if name in ("setpoint", "variable-mass", "variable-drag", "variable-mass-drag"):
        if args.controller is not None:
            builder_kwargs["controller"] = args.controller
    elif args.controller is not None:
        raise ValidationError(f"scenario {name!r} is open-loop; --controller does not apply")
    if args.thruster is not None:
        cond = standard_condition(builder_kwargs.get("condition", _builtin_default_condition(name)))
        if args.thruster == "pump":
            builder_kwargs["thruster"] = calibrated_pump_model(cond)
        else:
            from .propulsion import ThrusterModel

            builder_kwargs["thruster"] = ThrusterModel.bollard()
    if name == "acceleration":
        builder_kwargs["throttle"] = args.throttle
    return builtin_scenario(name, **builder_kwargs)


def _builtin_default_condition(name: str) -> str:
    return "full" if name.startswith("variable-mass") else "lightship"


def _run_one(spec, out_dir: Path) -> dict:
    log = run_scenario(spec)
    run_dir = out_dir / spec.name
    run_dir.mkdir(parents=True, exist_ok=True)
    csv_path = run_dir / "run.csv"
    log.write_csv(csv_path)
    metrics = None
    if spec.controller is not None:
        metrics = {"phases": phase_metrics(log)}
    log.write_summary(run_dir / "summary.json", metrics)
    return {"scenario": spec.name, "csv": str(csv_path)}


def _spec_for_pool(item):
    spec, out_dir = item
    return _run_one(spec, Path(out_dir))


def cmd_run(args) -> int:
    try:
        specs = [_build_spec(args, name) for name in args.scenario]
    except (ValidationError, ValueError) as exc:
        _error(str(exc))
        return EXIT_VALIDATION

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        if args.jobs > 1 and len(specs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_spec_for_pool, [(s, str(out_dir)) for s in specs]))
        else:
            results = [_run_one(spec, out_dir) for spec in specs]
    except ValidationError as exc:
        _error(str(exc))
        return EXIT_VALIDATION
    except SimulationError as exc:
        record = {"error": "numerical", "detail": str(exc)}
        (out_dir / "error.json").write_text(json.dumps(record, indent=2) + "\n")
        _error(str(exc))
        return EXIT_RUNTIME
    for result in results:
        print(f"{result['scenario']}: wrote {result['csv']}")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        log_a = RunLog.read_csv(args.log_a)
        log_b = RunLog.read_csv(args.log_b)
    except (LogFormatError, OSError) as exc:
        _error(str(exc))
        return EXIT_VALIDATION
    try:
        report = compare_controllers(log_a, log_b, args.label_a, args.label_b)
    except ValueError as exc:
        _error(str(exc))
        return EXIT_VALIDATION
    print(report.to_text())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
        )
        rows = report.to_dict()["rows"]
        with open(out / "comparison.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    return EXIT_OK


def _read_points(path: str) -> list[tuple[float, float]]:
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            try:
                values = [float(c) for c in cells]
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise LogFormatError(f"{path}:{lineno}: expected numeric row, got {line!r}")
            if len(values) < 2:
                raise LogFormatError(f"{path}:{lineno}: need at least (u, force) columns")
            points.append((values[0], values[-1]))
    return points


def cmd_fit(args) -> int:
    try:
        if args.model == "thrust-decay":
            condition = standard_condition(args.condition)
            if args.target_speed is None:
                model = calibrated_pump_model(condition, bollard_total=args.bollard_total)
                target = {"lightship": 2.8, "full": 2.5}[condition.label]
            else:
                target = args.target_speed
                decay = calibrate_thrust_decay(args.bollard_total, target, condition)
                from .propulsion import ThrusterModel

                model = ThrusterModel.pump(speed_decay=decay,
                                           jet_max_thrust=args.bollard_total / 2.0)
            print(f"condition: {condition.label}")
            print(f"target speed: {target} m/s, bollard total: {args.bollard_total} N")
            print(f"speed decay a1 (per jet): {model.speed_decay:.4f} N/(m/s)")
            print(f"speed decay a1 (two-jet total): {2 * model.speed_decay:.4f} N/(m/s)")
            return EXIT_OK

        points = _read_points(args.points)
        if args.model == "surge-drag":
            fit = fit_drag_quadratic(points)
            print(f"x_uu = {fit.x_uu:.6g} N/(m/s)^2")
            print(f"x_u  = {fit.x_u:.6g} N/(m/s)")
            print(f"residual RMS = {fit.residual_rms:.4g} N over {fit.sample_count} samples")
            if args.out:
                from .configio import save_condition_fragment

                save_condition_fragment(args.out, args.label, fit.x_u, fit.x_uu)
                print(f"wrote condition fragment {args.out}")
        else:  # tow-drag
            fit = fit_tow_drag(points)
            print(f"c_t = {fit.tow_drag_coeff:.6g} N/(m/s)^2")
            print(f"residual RMS = {fit.residual_rms:.4g} N over {fit.sample_count} samples")
            if fit.out_of_range:
                print(f"warning: samples outside the measured speed range: {fit.out_of_range}")
    except (LogFormatError, ValidationError, ValueError, KeyError, OSError) as exc:
        _error(str(exc))
        if isinstance(exc, ValueError) and "rank-deficient" in str(exc):
            print("hint: provide samples at two or more distinct speeds", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_derive_coeffs(args) -> int:
    try:
        geometry_cfg = None
        if args.config:
            import yaml

            raw = yaml.safe_load(Path(args.config).read_text(encoding="utf-8"))
            geometry_cfg = raw.get("geometry", raw) if isinstance(raw, dict) else None
        geometry = load_geometry(geometry_cfg)
        condition = standard_condition(args.condition)
        rows = coefficient_table(geometry, condition, (args.u, args.v, 0.0))
    except (ValidationError, ValueError, OSError) as exc:
        _error(str(exc))
        return EXIT_VALIDATION
    print(f"condition: {condition.label} (mass {condition.mass:g} kg)")
    print(f"reference velocity: u={args.u:g} m/s, v={args.v:g} m/s")
    print(f"{'coefficient':<12}{'factor':>10}{'value':>16}  note")
    for name, factor, value, note in rows:
        print(f"{name:<12}{factor:>10}{value:>16.4f}  {note}")
    if args.csv:
        Path(args.csv).write_text(coefficient_table_csv(rows), encoding="utf-8")
        print(f"wrote {args.csv}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="usvsim",
        description="Deterministic maneuvering simulator for a twin-hull waterjet USV",
    )
    parser.add_argument("--version", action="version", version=f"usvsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one or more scenarios")
    run.add_argument(
        "--scenario",
        action="append",
        required=True,
        help=f"builtin name ({', '.join(sorted(BUILTIN_SCENARIOS))}) or a YAML file;"
        " repeatable",
    )
    run.add_argument("--out", default="out", help="output directory (per-run subdirs)")
    run.add_argument("--controller", choices=["bs", "abs"], default=None)
    run.add_argument("--thruster", choices=["bollard", "pump"], default=None)
    run.add_argument("--condition", choices=["slick", "lightship", "full"], default=None)
    run.add_argument("--throttle", type=float, default=1.0, help="acceleration scenario throttle")
    run.add_argument("--duration", default=None, help="override duration (seconds or e.g. '90s')")
    run.add_argument("--dt", type=float, default=None, help="integrator step [s]")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--gamma", type=float, default=None, help="adaptation gain override")
    run.add_argument("--jobs", type=int, default=1, help="run scenarios concurrently")
    run.set_defaults(func=cmd_run)

    comp = sub.add_parser("compare", help="compare two run logs of the same scenario")
    comp.add_argument("log_a")
    comp.add_argument("log_b")
    comp.add_argument("--label-a", default=None)
    comp.add_argument("--label-b", default=None)
    comp.add_argument("--out", default=None, help="write comparison.csv/json here")
    comp.set_defaults(func=cmd_compare)

    fit = sub.add_parser("fit", help="system-identification fits")
    fit.add_argument("--model", choices=["surge-drag", "tow-drag", "thrust-decay"],
                     required=True)
    fit.add_argument("points", nargs="?", help="CSV of (u, force) rows")
    fit.add_argument("--condition", default="lightship")
    fit.add_argument("--bollard-total", type=float, default=DEFAULT_BOLLARD_TOTAL)
    fit.add_argument("--target-speed", type=float, default=None)
    fit.add_argument("--label", default="fitted")
    fit.add_argument("--out", default=None, help="write a condition config fragment")
    fit.set_defaults(func=cmd_fit)

    der = sub.add_parser("derive-coeffs", help="derived hydrodynamic coefficient table")
    der.add_argument("--config", default=None, help="geometry YAML")
    der.add_argument("--condition", default="lightship")
    der.add_argument("--u", type=float, default=0.0)
    der.add_argument("--v", type=float, default=0.0)
    der.add_argument("--csv", default=None, help="also write the table as CSV")
    der.set_defaults(func=cmd_derive_coeffs)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.command == "fit" and args.model != "thrust-decay" and not args.points:
        _error("fit requires a points CSV for this model")
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except SimulationError as exc:
        _error(str(exc))
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
