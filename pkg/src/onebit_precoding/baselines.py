"""Linear quantized precoders (MRT, ZF) and the infinite-resolution ZF
benchmark (ZFi)."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .admm import PrecodeOutput
from .model import RHO_FLOOR, ComplexChannel, SystemConfig, genie_rho, quantize_1bit

_ZF_RANK_RTOL = 1e-10


class LinearKind(enum.Enum):
    MRT = "mrt"
    ZF = "zf"


@dataclass(frozen=True)
class LinearPrecoder:
    matrix: np.ndarray  # R x U
    beta: float
    kind: LinearKind
    channel: ComplexChannel


def build_linear(channel: ComplexChannel, kind: LinearKind,
                 sys: SystemConfig) -> LinearPrecoder:
    """MRT: P = H^H. ZF: P = H^H (H H^H)^{-1}. beta normalizes the average
    transmit power to P_TX under unit-energy symbols."""
    H = channel.entries
    if kind is LinearKind.MRT:
        P = H.conj().T
    elif kind is LinearKind.ZF:
        sv = np.linalg.svd(H, compute_uv=False)
        if sv[-1] <= _ZF_RANK_RTOL * sv[0]:
            raise np.linalg.LinAlgError(
                "ZF requires a full-row-rank channel; condition number "
                f"{sv[0] / max(sv[-1], np.finfo(float).tiny):.3e}")
        P = H.conj().T @ np.linalg.inv(H @ H.conj().T)
    else:
        raise ValueError(f"unknown linear precoder kind: {kind}")
    beta = float(np.sqrt(sys.total_power / np.real(np.trace(P @ P.conj().T))))
    return LinearPrecoder(matrix=P, beta=beta, kind=kind, channel=channel)


def bussgang_gain(P: np.ndarray, total_power: float) -> np.ndarray:
    """Diagonal of the Bussgang linearization gain of the 1-bit quantizer,
    sqrt(2 P_TX / (pi R)) * diag(P P^H)^{-1/2}, for quantizer input P s."""
    P = np.asarray(P)
    row_power = np.sum(np.abs(P) ** 2, axis=1)
    return np.sqrt(2.0 * total_power / (np.pi * P.shape[0])) / np.sqrt(row_power)


def precode_linear_quantized(pre: LinearPrecoder, s: np.ndarray,
                             sys: SystemConfig) -> PrecodeOutput:
    """Quantize the linearly precoded signal; report both the Bussgang-derived
    and the genie receiver scales (the BER pipeline uses the genie one)."""
    s = np.asarray(s, dtype=complex)
    x = pre.beta * (pre.matrix @ s)
    z = quantize_1bit(x, sys.kappa)

    H = pre.channel.entries
    g = bussgang_gain(pre.beta * pre.matrix, sys.total_power)
    # Bussgang linearization z ~= G x gives the forward path H G (beta P);
    # its mean diagonal gain maps to the MMSE-convention scale by inversion.
    eff = H @ (g[:, None] * (pre.beta * pre.matrix))
    mean_gain = float(np.mean(np.real(np.diag(eff))))
    rho_buss = 1.0 / mean_gain if mean_gain > 0 else RHO_FLOOR

    rho = genie_rho(H, s, z, sys.num_users, sys.noise_variance)
    return PrecodeOutput(z=z, rho=rho, rho_bussgang=rho_buss)


def precode_zf_infinite(pre: LinearPrecoder, s: np.ndarray) -> np.ndarray:
    """Unquantized ZF transmit vector beta P s (average power constraint only)."""
    if pre.kind is not LinearKind.ZF:
        raise ValueError("infinite-resolution benchmark requires a ZF precoder")
    return pre.beta * (pre.matrix @ np.asarray(s, dtype=complex))
