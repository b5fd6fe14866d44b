"""Experiment configuration, scene phantoms, single runs, parameter sweeps and image export."""

from __future__ import annotations

import configparser
import csv
import dataclasses
import logging
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .forward import (
    AMPLITUDE_MODES,
    SpectralGrid,
    add_receiver_noise,
    build_measurement_vectors,
    cross_correlate,
    simulate_receiver_data,
)
from .geometry import SceneGrid, build_arc_geometry, build_scene_grid
from .lifted import LiftedOperator
from .pgm import read_pgm, write_pgm
from .solver import INIT_SCALES, SolverConfig, aligned_mse, relative_mse, solve

log = logging.getLogger(__name__)

PRESETS = ("active", "passive")
PHANTOMS = ("single", "blocks", "points")
SWEEP_AXES = ("receivers", "bandwidth", "center_frequency", "snr")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One imaging experiment.  Frequencies in Hz, lengths in meters, angles in radians."""

    center_frequency: float = 10e9
    bandwidth: float = 50e6
    freq_samples: int = 64
    receivers: int = 24
    aperture: float = 2 * np.pi
    receiver_range: float = 10_000.0
    receiver_height: float = 250.0
    tx_position: tuple[float, float, float] = (15_800.0, 0.0, 250.0)
    scene_side: float = 60.0
    points_per_side: int = 25
    snr_db: float | None = None
    iterations: int = 4000
    step_size: float = 0.15
    warmup: float = 100.0
    init_scale: str = "eigenvalue"
    power_iterations: int = 200
    seed: int = 0
    oversample_factor: int = 1
    amplitude_mode: str = "compensated"
    scene: str = "blocks"

    def __post_init__(self):
        if self.center_frequency <= 0 or self.bandwidth <= 0:
            raise ConfigError("center_frequency and bandwidth must be positive")
        if self.bandwidth >= 2 * self.center_frequency:
            raise ConfigError("bandwidth must be below twice the center frequency (all samples positive)")
        for name in ("freq_samples", "points_per_side", "oversample_factor", "power_iterations"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.receivers < 2:
            raise ConfigError("receivers must be >= 2")
        if not (0 < self.aperture <= 2 * np.pi + 1e-12):
            raise ConfigError("aperture must lie in (0, 2*pi]")
        if self.receiver_range <= 0 or self.scene_side <= 0:
            raise ConfigError("receiver_range and scene_side must be positive")
        if self.iterations < 0 or self.step_size <= 0 or self.warmup < 0:
            raise ConfigError("iterations >= 0, step_size > 0, warmup >= 0 required")
        if self.amplitude_mode not in AMPLITUDE_MODES:
            raise ConfigError(f"amplitude_mode must be one of {AMPLITUDE_MODES}")
        if self.init_scale not in INIT_SCALES:
            raise ConfigError(f"init_scale must be one of {INIT_SCALES}")
        if len(self.tx_position) != 3:
            raise ConfigError("tx_position needs three coordinates")

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @property
    def spectral(self) -> SpectralGrid:
        return SpectralGrid.from_hz(self.center_frequency, self.bandwidth, self.freq_samples)

    @property
    def grid(self) -> SceneGrid:
        return build_scene_grid(self.scene_side, self.points_per_side)

    @property
    def geometry(self):
        return build_arc_geometry(
            self.receivers,
            min(self.aperture, 2 * np.pi),
            self.receiver_range,
            self.receiver_height,
            self.tx_position,
        )

    def solver_config(self, seed=None) -> SolverConfig:
        return SolverConfig(
            max_iterations=self.iterations,
            step_size=self.step_size,
            warmup=self.warmup,
            init_scale=self.init_scale,
            power_iterations=self.power_iterations,
            seed=self.seed if seed is None else seed,
        )


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_INT_FIELDS = {"freq_samples", "receivers", "points_per_side", "iterations", "power_iterations", "seed", "oversample_factor"}
_STR_FIELDS = {"amplitude_mode", "scene", "init_scale"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _STR_FIELDS:
        return raw
    if key == "tx_position":
        parts = [p for p in raw.replace(",", " ").split() if p]
        return tuple(float(p) for p in parts)
    if key == "snr_db":
        return None if raw.lower() in ("", "none", "inf", "+inf") else float(raw)
    if key == "aperture" and raw.lower() in ("2pi", "2*pi"):
        return 2 * np.pi
    if key in _INT_FIELDS:
        return int(float(raw)) if float(raw).is_integer() else int(raw)
    return float(raw)


def preset_path(name: str) -> Path:
    return Path(str(resources.files("gwfradar") / "presets" / f"{name}.cfg"))


def load_config(path) -> ExperimentConfig:
    """Read a key = value config (an ``[experiment]`` header is optional).

    ``path`` may also name a bundled preset (``active`` / ``passive``).
    """
    p = Path(path)
    if not p.exists() and str(path) in PRESETS:
        p = preset_path(str(path))
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    text = p.read_text()
    if not any(line.lstrip().startswith("[") for line in text.splitlines()):
        text = "[experiment]\n" + text
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=str(p))
    except configparser.Error as exc:
        raise ConfigError(f"{p}: {exc}") from exc
    if not parser.has_section("experiment"):
        raise ConfigError(f"{p}: missing [experiment] section")
    values = {}
    for key, raw in parser.items("experiment"):
        if key not in _FIELDS:
            raise ConfigError(f"{p}: unknown field {key!r}")
        try:
            values[key] = _parse_value(key, raw)
        except ValueError as exc:
            raise ConfigError(f"{p}: invalid value for {key!r}: {raw!r}") from exc
    try:
        return ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{p}: {exc}") from exc


def dump_config(config: ExperimentConfig) -> str:
    lines = ["[experiment]"]
    for name in _FIELDS:
        v = getattr(config, name)
        if v is None:
            continue
        if name == "tx_position":
            v = ", ".join(repr(float(c)) for c in v)
        lines.append(f"{name} = {v}")
    return "\n".join(lines) + "\n"


# phantom "blocks": fractional [row0, row1) x [col0, col1) rectangles and point targets
_BLOCKS = (
    ((0.20, 0.40, 0.16, 0.48), 1.0),
    ((0.56, 0.84, 0.52, 0.72), 0.5),
)
_POINTS = (
    ((0.12, 0.72), 1.0),
    ((0.80, 0.16), 1.0),
    ((0.48, 0.48), 0.5),
)


def make_phantom(name: str, grid: SceneGrid) -> np.ndarray:
    """Nonnegative reflectivity in [0, 1], row-major over ``grid``.

    ``single``: one unit pixel at the center.  ``blocks``: two rectangles
    (values 1 and 0.5) plus three isolated points.  ``points``: the isolated
    points only.  Any other name is read as a PGM image path.
    """
    n = grid.points_per_side
    img = np.zeros((n, n))
    if name == "single":
        img[n // 2, n // 2] = 1.0
    elif name in ("blocks", "points"):
        if name == "blocks":
            for (r0, r1, c0, c1), value in _BLOCKS:
                img[int(r0 * n) : max(int(r1 * n), int(r0 * n) + 1), int(c0 * n) : max(int(c1 * n), int(c0 * n) + 1)] = value
        for (r, c), value in _POINTS:
            img[int(r * n), int(c * n)] = value
    elif name == "zero":
        raise ValueError("phantom 'zero' carries no signal")
    else:
        path = Path(name)
        if not path.exists():
            raise ValueError(f"unknown phantom {name!r} (choose from {PHANTOMS} or give a PGM path)")
        raw, maxval = read_pgm(path)
        if raw.shape != (n, n):
            raise ValueError(f"image {path} is {raw.shape[0]}x{raw.shape[1]}, grid needs {n}x{n}")
        img = raw / maxval
    if not np.any(img):
        raise ValueError("phantom is identically zero")
    return img.ravel()


def upsample_scene(rho: np.ndarray, points_per_side: int, factor: int) -> np.ndarray:
    """Piecewise-constant refinement; each sub-pixel carries 1/factor^2 of the weight."""
    if factor == 1:
        return np.asarray(rho, dtype=float)
    img = np.asarray(rho, dtype=float).reshape(points_per_side, points_per_side)
    return (np.kron(img, np.ones((factor, factor))) / factor**2).ravel()


def cell_seed(seed: int, label: str) -> np.random.SeedSequence:
    """Independent RNG stream for one sweep cell, stable across processes."""
    return np.random.SeedSequence([int(seed), zlib.crc32(label.encode())])


@dataclass
class RunResult:
    truth: np.ndarray
    estimate: np.ndarray
    history: list
    aligned_mse: float
    relative_mse: float
    eigenvalue: float


def simulate(config: ExperimentConfig, noise_seed=None):
    """Truth and interferometric data for ``config``."""
    grid = config.grid
    truth = make_phantom(config.scene, grid)
    q = config.oversample_factor
    if q > 1:
        fine = build_scene_grid(config.scene_side, config.points_per_side * q)
        vectors = build_measurement_vectors(fine, config.geometry, config.spectral, config.amplitude_mode)
        rho_data = upsample_scene(truth, config.points_per_side, q)
    else:
        vectors = build_measurement_vectors(grid, config.geometry, config.spectral, config.amplitude_mode)
        rho_data = truth
    received = simulate_receiver_data(rho_data, vectors)
    received = add_receiver_noise(received, config.snr_db, noise_seed if noise_seed is not None else config.seed)
    return truth, cross_correlate(received)


def reconstruction_operator(config: ExperimentConfig) -> LiftedOperator:
    return LiftedOperator(build_measurement_vectors(config.grid, config.geometry, config.spectral, config.amplitude_mode))


def run_experiment(config: ExperimentConfig, noise_seed=None, callback=None) -> RunResult:
    truth, data = simulate(config, noise_seed)
    op = reconstruction_operator(config)
    est, state = solve(data, op, config.solver_config(), callback=callback)
    return RunResult(truth, est, state.history, aligned_mse(est, truth), relative_mse(est, truth), state.eigenvalue)


def apply_axis(config: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    if axis == "receivers":
        return config.replace(receivers=int(value))
    if axis == "bandwidth":
        return config.replace(bandwidth=float(value))
    if axis == "center_frequency":
        return config.replace(center_frequency=float(value))
    if axis == "snr":
        return config.replace(snr_db=None if value is None else float(value))
    raise ValueError(f"unknown sweep axis {axis!r}, expected one of {SWEEP_AXES}")


SWEEP_COLUMNS = ("axis", "value", "seed", "status", "aligned_mse", "relative_mse", "final_objective", "iterations")


@dataclass
class SweepResult:
    axis: str
    rows: list[dict]
    wall_times: list[float]

    def write_csv(self, path) -> None:
        """Deterministic rows; wall-clock times go to a ``*_timing.csv`` sidecar."""
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SWEEP_COLUMNS)
            for r in self.rows:
                w.writerow([_fmt(r[c]) for c in SWEEP_COLUMNS])
        with open(path.with_name(path.stem + "_timing.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["value", "seed", "wall_time_s"])
            for r, t in zip(self.rows, self.wall_times):
                w.writerow([_fmt(r["value"]), r["seed"], f"{t:.3f}"])

    def mean_by_value(self, column: str = "relative_mse") -> tuple[np.ndarray, np.ndarray]:
        """Mean of ``column`` per swept value over successful seeds (NaN if none)."""
        values = sorted({r["value"] for r in self.rows})
        means = []
        for v in values:
            xs = [r[column] for r in self.rows if r["value"] == v and r["status"] == "ok"]
            means.append(np.mean(xs) if xs else np.nan)
        return np.array(values, dtype=float), np.array(means)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


def run_cell(config: ExperimentConfig, axis: str, value, seed: int) -> tuple[dict, float]:
    """One (value, seed) cell; numerical failures become a failure row."""
    t0 = time.perf_counter()
    row = {"axis": axis, "value": value, "seed": int(seed), "status": "ok", "aligned_mse": None,
           "relative_mse": None, "final_objective": None, "iterations": None}
    try:
        cfg = apply_axis(config, axis, value).replace(seed=int(seed))
        noise = cell_seed(seed, f"{axis}={value!r}")
        res = run_experiment(cfg, noise_seed=noise)
        row.update(aligned_mse=res.aligned_mse, relative_mse=res.relative_mse,
                   final_objective=float(res.history[-1]), iterations=len(res.history) - 1)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        row["status"] = f"failed: {type(exc).__name__}"
        log.warning("cell %s=%r seed=%s failed: %s", axis, value, seed, exc)
    return row, time.perf_counter() - t0


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(config: ExperimentConfig, axis: str, values, seeds, out=None, workers: int = 1) -> SweepResult:
    """Grid over ``values`` x ``seeds``; cells are independent and order-stable."""
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}, expected one of {SWEEP_AXES}")
    jobs = [(config, axis, v, s) for v in values for s in seeds]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell_args, jobs))
    else:
        results = [run_cell(*job) for job in jobs]
    result = SweepResult(axis, [r for r, _ in results], [t for _, t in results])
    if out is not None:
        result.write_csv(out)
    return result


def export_image(rho, grid: SceneGrid, path) -> None:
    """Write ``<path>.pgm`` (16-bit), ``<path>.csv`` (matrix) and ``<path>.txt`` (value range)."""
    base = Path(path).with_suffix("")
    img = grid.as_image(np.asarray(rho, dtype=float))
    lo, hi = float(img.min()), float(img.max())
    scaled = np.zeros_like(img) if hi == lo else (img - lo) / (hi - lo)
    write_pgm(base.with_suffix(".pgm"), np.rint(scaled * 65535).astype(np.uint16))
    np.savetxt(base.with_suffix(".csv"), img, delimiter=",", fmt="%.17g")
    base.with_suffix(".txt").write_text(f"min = {lo!r}\nmax = {hi!r}\n")


def load_exported(path) -> np.ndarray:
    """Inverse of :func:`export_image` from the PGM and its range sidecar."""
    base = Path(path).with_suffix("")
    raw, maxval = read_pgm(base.with_suffix(".pgm"))
    rng = {}
    for line in base.with_suffix(".txt").read_text().splitlines():
        k, _, v = line.partition("=")
        rng[k.strip()] = float(v)
    return (rng["min"] + raw / maxval * (rng["max"] - rng["min"])).ravel()
