"""Exhaustive ground-truth minimizer of the MMSE precoding objective over the
full 1-bit alphabet. Only feasible for tiny systems (R <= 10)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ComplexChannel, SystemConfig

MAX_ANTENNAS = 10
_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleResult:
    z_star: np.ndarray
    rho_star: float
    objective: float


def exhaustive_min(channel: ComplexChannel, s: np.ndarray,
                   sys: SystemConfig) -> OracleResult:
    """Enumerate all 4^R candidate vectors, pick the joint (z, rho) optimum.

    Candidates are ordered lexicographically over per-antenna sign pairs with
    +1 before -1; ties keep the earliest candidate, so the result is
    deterministic given (H, s).
    """
    if isinstance(channel, np.ndarray):
        channel = ComplexChannel(channel)
    R = channel.num_antennas
    U = channel.num_users
    if R > MAX_ANTENNAS:
        raise ValueError(
            f"exhaustive enumeration limited to R <= {MAX_ANTENNAS}, got R={R}")
    s = np.asarray(s, dtype=complex)
    H = channel.entries
    kappa = sys.kappa
    u_eps2 = sys.num_users * sys.noise_variance
    s_energy = float(np.real(np.vdot(s, s)))

    best_obj = np.inf
    best_idx = -1
    best_rho = 0.0
    shifts = 2 * np.arange(R)[::-1]  # antenna 0 in the most significant pair
    total = 1 << (2 * R)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        codes = (idx[:, None] >> shifts) & 0b11
        re = np.where(codes & 0b10, -1.0, 1.0)
        im = np.where(codes & 0b01, -1.0, 1.0)
        Z = kappa * (re + 1j * im)
        HZ = Z @ H.T  # (chunk, U)
        num = np.real(HZ @ np.conj(s))
        den = np.sum(np.abs(HZ) ** 2, axis=1) + u_eps2
        rho = np.clip(num / den, 0.0, None)
        obj = s_energy - 2.0 * rho * num + rho ** 2 * den
        j = int(np.argmin(obj))
        if obj[j] < best_obj:
            best_obj = float(obj[j])
            best_idx = int(idx[j])
            best_rho = float(rho[j])

    codes = (best_idx >> shifts) & 0b11
    z_star = kappa * (np.where(codes & 0b10, -1.0, 1.0)
                      + 1j * np.where(codes & 0b01, -1.0, 1.0))
    return OracleResult(z_star=z_star, rho_star=best_rho, objective=best_obj)
