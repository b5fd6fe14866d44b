"""Command-line entry point: simulate, reconstruct, sweep, bounds, validate.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from .bounds import BoundInputs, range_resolution, resolution_bound, ric_bound, sample_complexity_check, RIC_THRESHOLD
from .forward import InterferometricData
from .harness import (
    SWEEP_AXES,
    ConfigError,
    dump_config,
    export_image,
    load_config,
    make_phantom,
    reconstruction_operator,
    run_sweep,
    simulate,
)
from .solver import DegenerateDataError, DivergenceError, aligned_mse, solve
from .validation import run_validation

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2
log = logging.getLogger("gwfradar")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse list {text!r}") from exc


def _ints(text: str) -> list[int]:
    vals = _floats(text)
    if any(not v.is_integer() for v in vals):
        raise ConfigError(f"expected integers in {text!r}")
    return [int(v) for v in vals]


def cmd_simulate(args, config) -> int:
    truth, data = simulate(config)
    data.to_csv(args.out / "data.csv")
    export_image(truth, config.grid, args.out / "truth")
    (args.out / "config.cfg").write_text(dump_config(config))
    print(f"wrote {len(data.values)} correlations to {args.out / 'data.csv'}")
    return EXIT_OK


def cmd_reconstruct(args, config) -> int:
    truth = make_phantom(config.scene, config.grid)
    if args.data:
        data = InterferometricData.from_csv(args.data)
        if (data.N, data.M) != (config.receivers, config.freq_samples):
            raise ConfigError(f"data has N={data.N}, M={data.M}; config expects N={config.receivers}, M={config.freq_samples}")
    else:
        truth, data = simulate(config)
    op = reconstruction_operator(config)
    trace = []
    cb = (lambda k, rho, J: trace.append((k, J, aligned_mse(rho, truth)))) if args.trace else None
    try:
        est, state = solve(data, op, config.solver_config(), callback=cb)
    finally:
        if args.trace:
            with open(args.out / "trace.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["iteration", "objective", "aligned_mse"])
                w.writerows((k, repr(J), repr(m)) for k, J, m in trace)
    export_image(est, config.grid, args.out / "estimate")
    mse = aligned_mse(est, truth)
    rel = mse / float(np.mean(truth**2))
    with open(args.out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iterations", "final_objective", "aligned_mse", "relative_mse", "init_eigenvalue"])
        w.writerow([state.iteration, repr(state.history[-1]), repr(mse), repr(rel), repr(state.eigenvalue)])
    print(f"iterations={state.iteration} objective={state.history[-1]:.3e} aligned_mse={mse:.3e} relative_mse={rel:.3e}")
    return EXIT_OK


def cmd_sweep(args, config) -> int:
    if not args.sweep or args.values is None:
        raise ConfigError("sweep needs --sweep AXIS and --values LIST")
    values = _ints(args.values) if args.sweep == "receivers" else _floats(args.values)
    seeds = _ints(args.seeds)
    path = args.out / f"sweep_{args.sweep}.csv"
    result = run_sweep(config, args.sweep, values, seeds, out=path, workers=args.workers)
    failed = sum(r["status"] != "ok" for r in result.rows)
    x, m = result.mean_by_value()
    for xv, mv in zip(x, m):
        print(f"{args.sweep}={xv:g} mean_relative_mse={mv:.3e}")
    print(f"wrote {len(result.rows)} rows ({failed} failed) to {path}")
    return EXIT_OK


def bounds_report(config) -> tuple[str, list[tuple[str, object]]]:
    inputs = BoundInputs.from_setup(config.spectral, config.grid, config.geometry)
    ric = ric_bound(inputs)
    sc = sample_complexity_check(config.grid.K, config.freq_samples, config.receivers, config.scene_side, inputs.range_resolution)
    dmin = resolution_bound(inputs)
    rows = [
        ("range_resolution_m", range_resolution(config.spectral.bandwidth)),
        ("pixel_spacing_m", inputs.pixel_spacing),
        ("resolution_bound_m", dmin),
        ("super_resolution", inputs.pixel_spacing < inputs.range_resolution),
        ("ric_frequency_term", ric.frequency_term),
        ("ric_receiver_term_unit_constant", ric.receiver_term),
        ("ric_threshold", RIC_THRESHOLD),
        ("frequency_term_below_threshold", ric.frequency_term < RIC_THRESHOLD),
        ("M_times_N_sq", sc.samples),
        ("K_pow_5_4", sc.samples_required),
        ("N_sq", sc.receivers_sq),
        ("K_pow_3_4", sc.receivers_sq_required),
        ("M_required_sinc", sc.frequency_required),
    ]
    lines = [f"{k:34s} {v:.6g}" if isinstance(v, float) else f"{k:34s} {v}" for k, v in rows]
    lines += [f"{k:34s} {v}" for k, v in sc.flags().items()]
    if inputs.pixel_spacing < dmin:
        lines.append(f"warning: pixel spacing {inputs.pixel_spacing:.3g} m is below the resolution bound {dmin:.3g} m")
    return "\n".join(lines) + "\n", rows


def cmd_bounds(args, config) -> int:
    text, rows = bounds_report(config)
    (args.out / "bounds.txt").write_text(text)
    with open(args.out / "bounds.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["quantity", "value"])
        w.writerows((k, repr(v) if isinstance(v, float) else v) for k, v in rows)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args, config) -> int:
    checks = run_validation(instances=args.instances, seed=config.seed)
    with open(args.out / "validate.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["check", "error", "tolerance", "passed"])
        for c in checks:
            w.writerow([c.name, repr(c.error), repr(c.tolerance), c.passed])
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  err={c.error:.2e}")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERICAL


COMMANDS = {
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gwfradar", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", default="active", help="config file or preset name (active, passive)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--data", help="reconstruct: interferometric CSV from `simulate` (default: simulate afresh)")
    p.add_argument("--trace", action="store_true", help="reconstruct: write per-iteration trace.csv")
    p.add_argument("--sweep", choices=SWEEP_AXES, help="sweep axis")
    p.add_argument("--values", help="sweep values, comma separated")
    p.add_argument("--seeds", default="0", help="sweep seeds, comma separated")
    p.add_argument("--workers", type=int, default=1, help="sweep worker threads")
    p.add_argument("--instances", type=int, default=5, help="validate: random instances")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = load_config(args.config)
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, config)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, DegenerateDataError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
