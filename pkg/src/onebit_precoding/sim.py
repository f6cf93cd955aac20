"""Monte Carlo experiment engine: channel/symbol/noise generation, CSI-error
injection, end-to-end transmission, detection, and metric aggregation.

Trials are independent work units; each derives its own RNG stream from
(base seed, trial index), so aggregate results are identical regardless of
worker count or scheduling.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from .admm import AdmmConfig, build_cache, solve
from .baselines import (
    LinearKind,
    build_linear,
    precode_linear_quantized,
    precode_zf_infinite,
)
from .model import (
    ComplexChannel,
    Constellation,
    SystemConfig,
    build_constellation,
    genie_rho,
)


class Precoder(enum.Enum):
    ADMM = "admm"
    ZF_Q = "zf_q"
    MRT_Q = "mrt_q"
    ZFI = "zfi"


class CsiErrorModel(enum.Enum):
    NONE = "none"
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class CsiSpec:
    """CSI estimation error: H_hat = (1-delta) H + delta DeltaH.

    literal_blend flips to the H_hat = delta H + (1-delta) DeltaH convention
    for sensitivity checks.
    """

    delta: float = 0.0
    error_model: CsiErrorModel = CsiErrorModel.NONE
    literal_blend: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta <= 0.5:
            raise ValueError("delta must lie in [0, 0.5]")
        if self.delta > 0 and self.error_model is CsiErrorModel.NONE:
            raise ValueError("delta > 0 requires an error model")


@dataclass(frozen=True)
class TrialSpec:
    sys: SystemConfig
    precoder: Precoder
    snr_db: float
    csi: CsiSpec = field(default_factory=CsiSpec)
    seed: int = 0
    num_symbol_vectors: int = 10
    num_trials: int = 100
    admm: AdmmConfig = field(default_factory=AdmmConfig)
    channel_component_var: float = 1.0  # per real component, E|H_ij|^2 = 2 var

    def __post_init__(self) -> None:
        if self.num_symbol_vectors < 1 or self.num_trials < 1:
            raise ValueError("num_symbol_vectors and num_trials must be >= 1")


@dataclass(frozen=True)
class BerReport:
    snr_db: float
    precoder: str
    bit_errors: int
    bits_sent: int
    ber: float
    ci_lo: float
    ci_hi: float
    trials: int
    failures: int
    mean_iters: float
    wall_time_s: float
    csi_delta: float = 0.0
    csi_model: str = "none"


def noise_variance_for_snr(total_power: float, snr_db: float) -> float:
    return total_power * 10.0 ** (-snr_db / 10.0)


def wilson_interval(errors: int, total: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if total == 0:
        return 0.0, 1.0
    p = errors / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (p + z2 / (2 * total)) / denom
    half = z * np.sqrt(p * (1 - p) / total + z2 / (4 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def draw_channel(num_users: int, num_antennas: int, rng: np.random.Generator,
                 component_var: float = 1.0) -> ComplexChannel:
    """Channel with i.i.d. real/imaginary parts, each N(0, component_var)."""
    std = np.sqrt(component_var)
    H = std * (rng.standard_normal((num_users, num_antennas))
               + 1j * rng.standard_normal((num_users, num_antennas)))
    return ComplexChannel(H)


def corrupt_csi(channel: ComplexChannel, csi: CsiSpec,
                rng: np.random.Generator) -> ComplexChannel:
    if csi.delta == 0.0 or csi.error_model is CsiErrorModel.NONE:
        return channel
    shape = channel.entries.shape
    if csi.error_model is CsiErrorModel.GAUSSIAN:
        # CN(0, 1): each real component N(0, 1/2)
        err = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    else:
        # each real component (1/sqrt(3)) U(-1, 1)
        err = (rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape)) / np.sqrt(3.0)
    d = csi.delta
    if csi.literal_blend:
        mixed = d * channel.entries + (1.0 - d) * err
    else:
        mixed = (1.0 - d) * channel.entries + d * err
    return ComplexChannel(mixed)


def detect(y: np.ndarray, gain: float, constellation: Constellation):
    """Nearest-point detection of y / gain; returns (symbol indices, bits)."""
    if not gain > 0:
        raise ValueError("gain must be > 0")
    scaled = np.asarray(y, dtype=complex) / gain
    d2 = np.abs(scaled[:, None] - constellation.points[None, :]) ** 2
    idx = np.argmin(d2, axis=1)
    return idx, constellation.bit_table[idx]


@dataclass(frozen=True)
class TrialResult:
    bit_errors: int
    bits_sent: int
    iters_sum: int
    num_solves: int
    failed: bool = False


def _trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial_index,)))


def run_trial(spec: TrialSpec, trial_index: int) -> TrialResult:
    """One channel draw, num_symbol_vectors transmissions, error counting."""
    rng = _trial_rng(spec.seed, trial_index)
    eps2 = noise_variance_for_snr(spec.sys.total_power, spec.snr_db)
    sys = replace(spec.sys, noise_variance=eps2)
    const = build_constellation(sys.modulation)

    H = draw_channel(sys.num_users, sys.num_antennas, rng,
                     spec.channel_component_var)
    H_hat = corrupt_csi(H, spec.csi, rng)

    try:
        if spec.precoder is Precoder.ADMM:
            cache = build_cache(H_hat.real_stacked)
        elif spec.precoder is Precoder.MRT_Q:
            pre = build_linear(H_hat, LinearKind.MRT, sys)
        else:
            pre = build_linear(H_hat, LinearKind.ZF, sys)
    except np.linalg.LinAlgError:
        return TrialResult(0, 0, 0, 0, failed=True)

    errors = 0
    bits = 0
    iters = 0
    solves = 0
    noise_std = np.sqrt(eps2 / 2.0)
    for _ in range(spec.num_symbol_vectors):
        idx = rng.integers(0, const.size, sys.num_users)
        s = const.points[idx]
        if spec.precoder is Precoder.ADMM:
            out = solve(H_hat, s, sys, spec.admm, cache=cache)
            z = out.z
            iters += out.iters_used
            solves += 1
        elif spec.precoder is Precoder.ZFI:
            z = precode_zf_infinite(pre, s)
        else:
            z = precode_linear_quantized(pre, s, sys).z
        # genie-aided receiver scale, computed with the true channel
        rho = genie_rho(H.entries, s, z, sys.num_users, eps2)
        n = noise_std * (rng.standard_normal(sys.num_users)
                         + 1j * rng.standard_normal(sys.num_users))
        y = H.entries @ z + n
        _, det_bits = detect(y, 1.0 / rho, const)
        errors += int(np.sum(det_bits != const.bit_table[idx]))
        bits += sys.num_users * const.bits_per_symbol
    return TrialResult(errors, bits, iters, solves)


def run_point(spec: TrialSpec, workers: int = 1) -> BerReport:
    """Run all trials of one sweep point and aggregate a BerReport."""
    t0 = time.perf_counter()
    if workers <= 1:
        results = [run_trial(spec, i) for i in range(spec.num_trials)]
    else:
        results = Parallel(n_jobs=workers)(
            delayed(run_trial)(spec, i) for i in range(spec.num_trials))
    wall = time.perf_counter() - t0

    errors = sum(r.bit_errors for r in results)
    bits = sum(r.bits_sent for r in results)
    iters = sum(r.iters_sum for r in results)
    solves = sum(r.num_solves for r in results)
    failures = sum(1 for r in results if r.failed)
    ber = errors / bits if bits else 0.0
    lo, hi = wilson_interval(errors, bits)
    return BerReport(
        snr_db=spec.snr_db, precoder=spec.precoder.value,
        bit_errors=errors, bits_sent=bits, ber=ber, ci_lo=lo, ci_hi=hi,
        trials=spec.num_trials, failures=failures,
        mean_iters=iters / solves if solves else 0.0,
        wall_time_s=wall,
        csi_delta=spec.csi.delta, csi_model=spec.csi.error_model.value)


def run_sweep(specs: list[TrialSpec], workers: int = 1) -> list[BerReport]:
    return [run_point(spec, workers=workers) for spec in specs]
