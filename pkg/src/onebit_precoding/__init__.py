"""ADMM-based nonlinear precoding for massive MU-MIMO downlink systems with
1-bit DACs, with linear quantized baselines, an exhaustive oracle, and a
Monte Carlo BER harness."""

__version__ = "0.1.0"

from .admm import (
    AdmmConfig,
    AdmmState,
    ContinuationSchedule,
    PrecodeOutput,
    SpectralCache,
    build_cache,
    lambda_target,
    project_omega,
    reg_coefficient,
    solve,
    stationarity_residual,
    v_update,
)
from .baselines import (
    LinearKind,
    LinearPrecoder,
    build_linear,
    bussgang_gain,
    precode_linear_quantized,
    precode_zf_infinite,
)
from .model import (
    ComplexChannel,
    Constellation,
    Modulation,
    QuantizerParams,
    SystemConfig,
    build_constellation,
    genie_rho,
    mse_objective,
    quantize_1bit,
    stack_real,
    unstack_vector,
)
from .oracle import OracleResult, exhaustive_min
from .sim import (
    BerReport,
    CsiErrorModel,
    CsiSpec,
    Precoder,
    TrialSpec,
    corrupt_csi,
    detect,
    draw_channel,
    noise_variance_for_snr,
    run_point,
    run_sweep,
    run_trial,
    wilson_interval,
)

__all__ = [
    "AdmmConfig", "AdmmState", "ContinuationSchedule", "PrecodeOutput",
    "SpectralCache", "build_cache", "lambda_target", "project_omega",
    "reg_coefficient", "solve", "stationarity_residual", "v_update",
    "LinearKind", "LinearPrecoder", "build_linear", "bussgang_gain",
    "precode_linear_quantized", "precode_zf_infinite",
    "ComplexChannel", "Constellation", "Modulation", "QuantizerParams",
    "SystemConfig", "build_constellation", "genie_rho", "mse_objective",
    "quantize_1bit", "stack_real", "unstack_vector",
    "OracleResult", "exhaustive_min",
    "BerReport", "CsiErrorModel", "CsiSpec", "Precoder", "TrialSpec",
    "corrupt_csi", "detect", "draw_channel", "noise_variance_for_snr",
    "run_point", "run_sweep",
    "run_trial", "wilson_interval",
]
