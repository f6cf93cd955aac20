"""Domain types and pure transforms for the 1-bit MU-MIMO downlink.

Everything here is immutable after construction and safe to share across
concurrent trial workers.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

# Floor for the receiver scale when the matched projection is nonpositive.
RHO_FLOOR = 1e-12


class Modulation(enum.Enum):
    QPSK = 2
    QAM16 = 4
    QAM64 = 6

    @property
    def bits_per_symbol(self) -> int:
        return self.value


@dataclass(frozen=True)
class SystemConfig:
    """Downlink system parameters: U users, R base-station antennas."""

    num_users: int
    num_antennas: int
    noise_variance: float
    total_power: float = 1.0
    modulation: Modulation = Modulation.QPSK

    def __post_init__(self) -> None:
        if self.num_users < 1:
            raise ValueError("num_users must be a positive integer")
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be a positive integer")
        if self.num_users > self.num_antennas:
            raise ValueError("underloaded downlink required: num_users <= num_antennas")
        if not self.total_power > 0:
            raise ValueError("total_power must be > 0")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be >= 0")

    @property
    def snr(self) -> float:
        """Linear SNR, total_power / noise_variance."""
        if self.noise_variance == 0:
            return np.inf
        return self.total_power / self.noise_variance

    @property
    def kappa(self) -> float:
        """Per-component DAC output level sqrt(P_TX / (2R))."""
        return float(np.sqrt(self.total_power / (2.0 * self.num_antennas)))


def sign_pos(x: np.ndarray) -> np.ndarray:
    """Sign with the fixed tie-break sign(0) -> +1."""
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def stack_real(x: np.ndarray) -> np.ndarray:
    """Real stacking: vectors map to [Re; Im], U x R matrices to the
    2U x 2R block matrix [[Re, -Im], [Im, Re]]."""
    x = np.asarray(x)
    if not np.all(np.isfinite(x)):
        raise ValueError("stack_real: input has non-finite entries")
    if x.ndim == 1:
        return np.concatenate([x.real, x.imag]).astype(float)
    if x.ndim == 2:
        return np.block([[x.real, -x.imag], [x.imag, x.real]]).astype(float)
    raise ValueError("stack_real: expected a vector or a matrix")


def unstack_vector(v: np.ndarray) -> np.ndarray:
    """Inverse of stack_real for vectors: [Re; Im] -> Re + j Im."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size % 2 != 0:
        raise ValueError("unstack_vector: expected a real vector of even length")
    n = v.size // 2
    return v[:n] + 1j * v[n:]


@dataclass(frozen=True)
class ComplexChannel:
    """U x R complex channel with its cached 2U x 2R real stacking."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        H = np.asarray(self.entries, dtype=complex)
        if H.ndim != 2:
            raise ValueError("channel must be a 2-D matrix")
        if not np.all(np.isfinite(H)):
            raise ValueError("channel has non-finite entries")
        object.__setattr__(self, "entries", H)

    @property
    def num_users(self) -> int:
        return self.entries.shape[0]

    @property
    def num_antennas(self) -> int:
        return self.entries.shape[1]

    @cached_property
    def real_stacked(self) -> np.ndarray:
        return stack_real(self.entries)


@dataclass(frozen=True)
class QuantizerParams:
    """1-bit DAC output level; alphabet is kappa * {1+j, 1-j, -1+j, -1-j}."""

    kappa: float

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")

    @classmethod
    def for_system(cls, sys: SystemConfig) -> "QuantizerParams":
        return cls(kappa=sys.kappa)

    @property
    def alphabet(self) -> np.ndarray:
        return self.kappa * np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])


def quantize_1bit(x: np.ndarray, kappa: float) -> np.ndarray:
    """Quantize real and imaginary parts separately to kappa * (+-1 +- j)."""
    if not kappa > 0:
        raise ValueError("kappa must be > 0")
    x = np.asarray(x, dtype=complex)
    if not np.all(np.isfinite(x)):
        raise ValueError("quantize_1bit: input has non-finite entries")
    return kappa * (sign_pos(x.real) + 1j * sign_pos(x.imag))


@dataclass(frozen=True)
class Constellation:
    """Square Gray-coded QAM alphabet with unit average symbol energy.

    points[i] is the symbol whose bit label is the MSB-first binary
    expansion of i; the first half of the bits select the I axis, the
    second half the Q axis.
    """

    points: np.ndarray
    bits_per_symbol: int
    bit_table: np.ndarray  # (M, bits_per_symbol) array of 0/1

    def bits_of(self, indices: np.ndarray) -> np.ndarray:
        return self.bit_table[indices]

    @property
    def size(self) -> int:
        return self.points.size


def _gray_axis_amplitudes(num_levels: int) -> np.ndarray:
    # amp[g] = PAM amplitude of the level whose Gray label is g
    amp = np.empty(num_levels)
    for level in range(num_levels):
        amp[level ^ (level >> 1)] = 2 * level - (num_levels - 1)
    return amp


def build_constellation(modulation: Modulation) -> Constellation:
    k = modulation.bits_per_symbol
    half = k // 2
    levels = 1 << half
    amp = _gray_axis_amplitudes(levels)

    labels = np.arange(1 << k)
    i_bits = labels >> half
    q_bits = labels & (levels - 1)
    points = amp[i_bits] + 1j * amp[q_bits]
    points = points / np.sqrt(np.mean(np.abs(points) ** 2))

    bit_table = ((labels[:, None] >> np.arange(k)[::-1]) & 1).astype(np.int8)
    return Constellation(points=points, bits_per_symbol=k, bit_table=bit_table)


def genie_rho(H: np.ndarray, s: np.ndarray, z: np.ndarray,
              num_users: int, noise_variance: float) -> float:
    """Receiver scale minimizing ||s - rho H z||^2 + rho^2 U eps^2 over rho >= 0."""
    Hz = np.asarray(H) @ np.asarray(z)
    num = float(np.real(np.vdot(s, Hz)))
    den = float(np.real(np.vdot(Hz, Hz))) + num_users * noise_variance
    if num <= 0 or den <= 0:
        return RHO_FLOOR
    return num / den


def mse_objective(H: np.ndarray, s: np.ndarray, z: np.ndarray, rho: float,
                  num_users: int, noise_variance: float) -> float:
    """MMSE precoding objective ||s - rho H z||^2 + rho^2 U eps^2."""
    r = np.asarray(s) - rho * (np.asarray(H) @ np.asarray(z))
    return float(np.real(np.vdot(r, r))) + rho ** 2 * num_users * noise_variance
