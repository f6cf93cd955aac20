"""Command-line front end: configure, execute, and serialize experiments.

Usage: onebit-precoding run CONFIG [--out DIR] [--seed N] [--workers N]

The config is an INI-style sectioned key-value file; see README for the
schema. Each experiment writes one CSV plus a JSON manifest. Exit codes:
0 success, 2 config error, 3 excessive per-trial failure rate.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import json
import os
import sys as _sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .admm import AdmmConfig, ContinuationSchedule, build_cache, solve
from .baselines import LinearKind, build_linear, precode_linear_quantized
from .model import Modulation, SystemConfig, build_constellation, mse_objective
from .oracle import MAX_ANTENNAS, exhaustive_min
from .sim import (
    CsiErrorModel,
    CsiSpec,
    Precoder,
    TrialSpec,
    draw_channel,
    noise_variance_for_snr,
    run_point,
)

WORKERS_ENV = "ONEBIT_PRECODING_WORKERS"
MAX_FAILURE_RATE = 0.01

EXPERIMENTS = ("ber_sweep", "convergence", "csi_sweep", "runtime_scaling",
               "oracle_gap")

_MODULATIONS = {
    "qpsk": Modulation.QPSK,
    "16qam": Modulation.QAM16,
    "qam16": Modulation.QAM16,
    "64qam": Modulation.QAM64,
    "qam64": Modulation.QAM64,
}

_PRECODERS = {p.value: p for p in Precoder}
_CSI_MODELS = {m.value: m for m in CsiErrorModel}


class ConfigError(Exception):
    """Raised for schema violations; the message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    num_users: int
    num_antennas: int
    modulation: Modulation
    total_power: float
    channel_component_var: float
    snr_grid_db: tuple[float, ...]
    delta_grid: tuple[float, ...]
    csi_error_models: tuple[CsiErrorModel, ...]
    precoders: tuple[Precoder, ...]
    antenna_grid: tuple[int, ...]
    trials: int
    num_symbol_vectors: int
    base_seed: int
    admm: AdmmConfig = field(default_factory=AdmmConfig)


def _get(parser, section, key, conv, default=None, required=False):
    if not parser.has_option(section, key):
        if required:
            raise ConfigError(f"missing required field [{section}] {key}")
        return default
    raw = parser.get(section, key)
    try:
        return conv(raw)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"invalid value for [{section}] {key}: {raw!r}") from exc


def _float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(t) for t in raw.replace(",", " ").split())


def _int_list(raw: str) -> tuple[int, ...]:
    return tuple(int(t) for t in raw.replace(",", " ").split())


def load_config(path: str | Path) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file: {path}")

    experiment = _get(parser, "experiment", "kind", str, required=True)
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"invalid value for [experiment] kind: {experiment!r} "
            f"(expected one of {', '.join(EXPERIMENTS)})")

    num_users = _get(parser, "system", "num_users", int, required=True)
    num_antennas = _get(parser, "system", "num_antennas", int, required=True)
    modulation = _get(parser, "system", "modulation",
                      lambda r: _MODULATIONS[r.lower()], Modulation.QPSK)
    total_power = _get(parser, "system", "total_power", float, 1.0)
    component_var = _get(parser, "system", "channel_component_var", float, 1.0)

    snr_grid = _get(parser, "sweep", "snr_grid_db", _float_list, (0.0,))
    delta_grid = _get(parser, "sweep", "delta_grid", _float_list, ())
    models = _get(parser, "sweep", "csi_error_models",
                  lambda r: tuple(_CSI_MODELS[t.lower()] for t in r.split()),
                  (CsiErrorModel.GAUSSIAN, CsiErrorModel.UNIFORM))
    precoders = _get(parser, "sweep", "precoders",
                     lambda r: tuple(_PRECODERS[t.lower()] for t in r.split()),
                     (Precoder.ADMM, Precoder.ZF_Q, Precoder.ZFI))
    antenna_grid = _get(parser, "sweep", "antenna_grid", _int_list,
                        (16, 32, 64, 128, 256))
    num_symbol_vectors = _get(parser, "sweep", "num_symbol_vectors", int, 10)

    trials = _get(parser, "experiment", "trials", int, 1000)
    base_seed = _get(parser, "experiment", "base_seed", int, 0)

    admm = AdmmConfig(
        max_iters=_get(parser, "admm", "max_iters", int, 100),
        rel_tol=_get(parser, "admm", "rel_tol", float, 1e-7),
        continuation=ContinuationSchedule(
            lambda_init_divisor=_get(parser, "admm", "lambda_init_divisor",
                                     float, 64.0),
            growth_factor=_get(parser, "admm", "growth_factor", float, 1.07)),
        margin=_get(parser, "admm", "margin", float, 1e-3))

    if not snr_grid:
        raise ConfigError("invalid value for [sweep] snr_grid_db: empty grid")
    if trials < 1:
        raise ConfigError("invalid value for [experiment] trials: must be >= 1")
    if experiment == "csi_sweep" and not delta_grid:
        raise ConfigError("missing required field [sweep] delta_grid")
    if experiment == "oracle_gap" and num_antennas > MAX_ANTENNAS:
        raise ConfigError(
            f"invalid value for [system] num_antennas: oracle_gap requires "
            f"num_antennas <= {MAX_ANTENNAS}")
    try:
        SystemConfig(num_users, num_antennas, noise_variance=1.0,
                     total_power=total_power, modulation=modulation)
    except ValueError as exc:
        raise ConfigError(f"invalid [system] section: {exc}") from exc

    return ExperimentConfig(
        experiment=experiment, num_users=num_users, num_antennas=num_antennas,
        modulation=modulation, total_power=total_power,
        channel_component_var=component_var, snr_grid_db=snr_grid,
        delta_grid=delta_grid, csi_error_models=models, precoders=precoders,
        antenna_grid=antenna_grid, trials=trials,
        num_symbol_vectors=num_symbol_vectors, base_seed=base_seed, admm=admm)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _system(cfg: ExperimentConfig, snr_db: float,
            num_antennas: int | None = None) -> SystemConfig:
    return SystemConfig(
        num_users=cfg.num_users,
        num_antennas=num_antennas or cfg.num_antennas,
        noise_variance=noise_variance_for_snr(cfg.total_power, snr_db),
        total_power=cfg.total_power,
        modulation=cfg.modulation)


def _trial_spec(cfg: ExperimentConfig, precoder: Precoder, snr_db: float,
                csi: CsiSpec = CsiSpec()) -> TrialSpec:
    return TrialSpec(
        sys=_system(cfg, snr_db), precoder=precoder, snr_db=snr_db, csi=csi,
        seed=cfg.base_seed, num_symbol_vectors=cfg.num_symbol_vectors,
        num_trials=cfg.trials, admm=cfg.admm,
        channel_component_var=cfg.channel_component_var)


def _run_ber_sweep(cfg: ExperimentConfig, workers: int):
    header = ["snr_db", "precoder", "ber", "ci_lo", "ci_hi", "bit_errors",
              "bits_sent", "trials", "mean_iters", "wall_time_s"]
    rows = []
    failures = trials = 0
    for snr_db in cfg.snr_grid_db:
        for precoder in cfg.precoders:
            rep = run_point(_trial_spec(cfg, precoder, snr_db), workers)
            failures += rep.failures
            trials += rep.trials
            rows.append([rep.snr_db, rep.precoder, rep.ber, rep.ci_lo,
                         rep.ci_hi, rep.bit_errors, rep.bits_sent, rep.trials,
                         rep.mean_iters, rep.wall_time_s])
    return header, rows, failures, trials


def _run_csi_sweep(cfg: ExperimentConfig, workers: int):
    header = ["delta", "error_model", "precoder", "snr_db", "ber", "ci_lo",
              "ci_hi", "bit_errors", "bits_sent", "trials", "wall_time_s"]
    snr_db = cfg.snr_grid_db[0]
    rows = []
    failures = trials = 0
    for model in cfg.csi_error_models:
        for delta in cfg.delta_grid:
            csi = CsiSpec(delta=delta, error_model=model) if delta > 0 else CsiSpec()
            for precoder in cfg.precoders:
                rep = run_point(_trial_spec(cfg, precoder, snr_db, csi), workers)
                failures += rep.failures
                trials += rep.trials
                rows.append([delta, model.value, rep.precoder, rep.snr_db,
                             rep.ber, rep.ci_lo, rep.ci_hi, rep.bit_errors,
                             rep.bits_sent, rep.trials, rep.wall_time_s])
    return header, rows, failures, trials


def _run_convergence(cfg: ExperimentConfig, workers: int):
    del workers  # single instance per SNR point
    header = ["snr_db", "iter", "delta_v", "delta_u", "lagrangian"]
    rows = []
    const = build_constellation(cfg.modulation)
    for snr_db in cfg.snr_grid_db:
        sys_cfg = _system(cfg, snr_db)
        rng = np.random.default_rng(
            np.random.SeedSequence(cfg.base_seed, spawn_key=(hash(snr_db) & 0xFFFF,)))
        H = draw_channel(cfg.num_users, cfg.num_antennas, rng,
                         cfg.channel_component_var)
        s = const.points[rng.integers(0, const.size, cfg.num_users)]
        out = solve(H, s, sys_cfg, cfg.admm)
        for k, ((dv, du), lagr) in enumerate(
                zip(out.gap_history, out.lagrangian_trace)):
            rows.append([snr_db, k, float(dv), float(du), float(lagr)])
    return header, rows, 0, len(cfg.snr_grid_db)


def _run_runtime_scaling(cfg: ExperimentConfig, workers: int):
    del workers
    header = ["num_antennas", "mean_iters", "mean_solve_s", "mean_iter_s"]
    rows = []
    const = build_constellation(cfg.modulation)
    for R in cfg.antenna_grid:
        if R < cfg.num_users:
            raise ConfigError(
                f"invalid value for [sweep] antenna_grid: {R} < num_users")
        rng = np.random.default_rng(
            np.random.SeedSequence(cfg.base_seed, spawn_key=(R,)))
        total_time = 0.0
        total_iters = 0
        for _ in range(cfg.trials):
            sys_cfg = _system(cfg, cfg.snr_grid_db[0], num_antennas=R)
            H = draw_channel(cfg.num_users, R, rng, cfg.channel_component_var)
            s = const.points[rng.integers(0, const.size, cfg.num_users)]
            t0 = time.perf_counter()
            out = solve(H, s, sys_cfg, cfg.admm)
            total_time += time.perf_counter() - t0
            total_iters += out.iters_used
        rows.append([R, total_iters / cfg.trials, total_time / cfg.trials,
                     total_time / total_iters])
    return header, rows, 0, len(cfg.antenna_grid) * cfg.trials


def _run_oracle_gap(cfg: ExperimentConfig, workers: int):
    del workers
    header = ["trial", "admm_objective", "zfq_objective", "oracle_objective"]
    rows = []
    const = build_constellation(cfg.modulation)
    snr_db = cfg.snr_grid_db[0]
    sys_cfg = _system(cfg, snr_db)
    failures = 0
    for t in range(cfg.trials):
        rng = np.random.default_rng(
            np.random.SeedSequence(cfg.base_seed, spawn_key=(t,)))
        H = draw_channel(cfg.num_users, cfg.num_antennas, rng,
                         cfg.channel_component_var)
        s = const.points[rng.integers(0, const.size, cfg.num_users)]
        out = solve(H, s, sys_cfg, cfg.admm)
        admm_obj = mse_objective(H.entries, s, out.z, out.rho,
                                 cfg.num_users, sys_cfg.noise_variance)
        try:
            zf = build_linear(H, LinearKind.ZF, sys_cfg)
            zf_out = precode_linear_quantized(zf, s, sys_cfg)
            zf_obj = mse_objective(H.entries, s, zf_out.z, zf_out.rho,
                                   cfg.num_users, sys_cfg.noise_variance)
        except np.linalg.LinAlgError:
            failures += 1
            continue
        orc = exhaustive_min(H, s, sys_cfg)
        rows.append([t, admm_obj, zf_obj, orc.objective])
    return header, rows, failures, cfg.trials


_RUNNERS = {
    "ber_sweep": _run_ber_sweep,
    "csi_sweep": _run_csi_sweep,
    "convergence": _run_convergence,
    "runtime_scaling": _run_runtime_scaling,
    "oracle_gap": _run_oracle_gap,
}


def run_config(cfg: ExperimentConfig, out_dir: str | Path,
               workers: int = 1) -> int:
    """Execute the configured experiment; returns a process exit code."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    header, rows, failures, trials = _RUNNERS[cfg.experiment](cfg, workers)
    wall = time.perf_counter() - t0

    csv_path = out / f"{cfg.experiment}.csv"
    _write_csv(csv_path, header, rows)

    manifest = {
        "experiment": cfg.experiment,
        "version": __version__,
        "base_seed": cfg.base_seed,
        "workers": workers,
        "wall_time_s": wall,
        "outputs": [csv_path.name],
        "config": {
            "num_users": cfg.num_users,
            "num_antennas": cfg.num_antennas,
            "modulation": cfg.modulation.name,
            "total_power": cfg.total_power,
            "channel_component_var": cfg.channel_component_var,
            "snr_grid_db": list(cfg.snr_grid_db),
            "delta_grid": list(cfg.delta_grid),
            "csi_error_models": [m.value for m in cfg.csi_error_models],
            "precoders": [p.value for p in cfg.precoders],
            "antenna_grid": list(cfg.antenna_grid),
            "trials": cfg.trials,
            "num_symbol_vectors": cfg.num_symbol_vectors,
            "admm": {
                "max_iters": cfg.admm.max_iters,
                "rel_tol": cfg.admm.rel_tol,
                "lambda_init_divisor": cfg.admm.continuation.lambda_init_divisor,
                "growth_factor": cfg.admm.continuation.growth_factor,
                "margin": cfg.admm.margin,
            },
        },
    }
    (out / f"{cfg.experiment}_manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n")

    if trials and failures / trials > MAX_FAILURE_RATE:
        print(f"error: precoder failure rate {failures}/{trials} exceeds "
              f"{MAX_FAILURE_RATE:.0%}", file=_sys.stderr)
        return 3
    return 0


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="onebit-precoding",
        description="1-bit MU-MIMO precoding experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run an experiment from a config file")
    run_p.add_argument("config", help="path to the INI config file")
    run_p.add_argument("--out", default="results", help="output directory")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override [experiment] base_seed")
    run_p.add_argument("--workers", type=int, default=None,
                       help=f"trial workers (default ${WORKERS_ENV} or 1)")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, base_seed=args.seed)
    workers = args.workers if args.workers is not None else _default_workers()
    return run_config(cfg, args.out, workers=workers)


if __name__ == "__main__":
    raise SystemExit(main())
