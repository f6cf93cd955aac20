"""Nonlinear 1-bit precoder via ADMM on the real-stacked problem.

The complex MMSE problem is rewritten over v = stack([Re v; Im v]) with the
constant-modulus constraint handled through an auxiliary variable u and a
scaled dual w. Each iteration performs the constant-modulus projection, a
regularized least-squares update accelerated by a cached eigenbasis of
H~^T H~, and the dual ascent step. The penalty is warm-started small and
doubled until it reaches the convergence-certified target.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import (
    ComplexChannel,
    SystemConfig,
    genie_rho,
    sign_pos,
    stack_real,
    unstack_vector,
)


@dataclass(frozen=True)
class ContinuationSchedule:
    """Penalty warm-start: start at target/divisor, multiply by growth_factor
    each iteration, cap at the target."""

    # growth 1.07 keeps the penalty small long enough that almost all
    # progress happens before the cap; once lam hits the certified target the
    # iterate gaps collapse within a few iterations
    lambda_init_divisor: float = 64.0
    growth_factor: float = 1.07

    def __post_init__(self) -> None:
        if not self.lambda_init_divisor >= 1:
            raise ValueError("lambda_init_divisor must be >= 1")
        if not self.growth_factor > 1:
            raise ValueError("growth_factor must be > 1")


@dataclass(frozen=True)
class AdmmConfig:
    max_iters: int = 100
    rel_tol: float = 1e-7
    continuation: ContinuationSchedule = field(default_factory=ContinuationSchedule)
    margin: float = 1e-3

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if not self.margin > 0:
            raise ValueError("margin must be > 0")


@dataclass(frozen=True)
class AdmmState:
    """Iterates after a completed iteration, at penalty lam."""

    v_tilde: np.ndarray
    u: np.ndarray
    w: np.ndarray
    lam: float
    lagrangian: float
    iteration: int


@dataclass(frozen=True)
class SpectralCache:
    """Eigendecomposition of H~^T H~ reused across penalty changes.

    basis is 2R x 2R orthonormal, eigvals the (zero-padded) eigenvalues, and
    h_stacked the 2U x 2R real stacking the cache was built from.
    """

    basis: np.ndarray
    eigvals: np.ndarray
    h_stacked: np.ndarray

    @property
    def phi(self) -> float:
        """Largest eigenvalue of H~^T H~ (= squared largest singular value)."""
        return float(self.eigvals.max()) if self.eigvals.size else 0.0


def build_cache(h_stacked: np.ndarray) -> SpectralCache:
    # economy SVD of H~ itself; eigenvalues of H~^T H~ are the squared
    # singular values, padded with zeros up to 2R
    h_stacked = np.asarray(h_stacked, dtype=float)
    _, sv, vt = np.linalg.svd(h_stacked, full_matrices=True)
    n = h_stacked.shape[1]
    eigvals = np.zeros(n)
    eigvals[: sv.size] = sv ** 2
    return SpectralCache(basis=vt.T.copy(), eigvals=eigvals, h_stacked=h_stacked)


def reg_coefficient(num_users: int, noise_variance: float, total_power: float) -> float:
    """Tikhonov weight c = U eps^2 / P_TX of the real-stacked objective."""
    if not total_power > 0:
        raise ValueError("total_power must be > 0")
    return num_users * noise_variance / total_power


def lambda_target(phi: float, c: float, margin: float) -> float:
    """Smallest certified penalty, inflated by (1 + margin) to make the
    sufficient convergence condition strict."""
    base = max(np.sqrt(c * c + 8.0 * (phi + c) ** 2) - c, 8.0 * phi, 8.0 * c)
    return (1.0 + margin) * float(base)


def project_omega(omega: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the constant-modulus set: sign pattern of
    omega (sign(0) -> +1) at common modulus ||omega||_1 / (2R)."""
    omega = np.asarray(omega, dtype=float)
    a = np.abs(omega).sum() / omega.size
    return np.where(omega >= 0, a, -a)


def v_update(cache: SpectralCache, s_stacked: np.ndarray, u: np.ndarray,
             w: np.ndarray, c: float, lam: float) -> np.ndarray:
    """Closed-form regularized LS step
    [2 H~^T H~ + (2c + lam) I]^{-1} (2 H~^T s~ + lam u + w)
    evaluated in the cached eigenbasis; O(R^2) per call."""
    d = 2.0 * (cache.h_stacked.T @ s_stacked) + lam * u + w
    shat = 2.0 * cache.eigvals + (2.0 * c + lam)
    return cache.basis @ ((cache.basis.T @ d) / shat)


@dataclass(frozen=True)
class PrecodeOutput:
    """Precoded vector plus solver diagnostics."""

    z: np.ndarray
    rho: float
    iters_used: int = 0
    gap_history: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    lagrangian_trace: np.ndarray = field(default_factory=lambda: np.empty(0))
    lambda_trace: np.ndarray = field(default_factory=lambda: np.empty(0))
    lambda_target: float = 0.0
    phi: float = 0.0
    final_state: AdmmState | None = None
    rho_bussgang: float | None = None


def augmented_lagrangian(h_stacked: np.ndarray, s_stacked: np.ndarray,
                         v: np.ndarray, u: np.ndarray, w: np.ndarray,
                         c: float, lam: float) -> float:
    r = s_stacked - h_stacked @ v
    d = v - u
    return float(r @ r + c * (v @ v) - w @ d + 0.5 * lam * (d @ d))


def _rel_gap(new: np.ndarray, old: np.ndarray) -> float:
    den = float(np.linalg.norm(new))
    num = float(np.linalg.norm(new - old))
    if den == 0.0:
        return 0.0 if num == 0.0 else np.inf
    return num / den


def solve(channel: ComplexChannel, s: np.ndarray, sys: SystemConfig,
          cfg: AdmmConfig | None = None,
          cache: SpectralCache | None = None) -> PrecodeOutput:
    """Run the ADMM iteration and round the result onto the 1-bit alphabet.

    Per iteration (penalty lam_k): constant-modulus projection of
    v^k - w^k/lam, then the regularized LS update using the fresh u, then
    the dual step w <- w - lam (v - u). Iterate gaps are checked against
    rel_tol only once the penalty has reached its target.
    """
    cfg = cfg or AdmmConfig()
    if isinstance(channel, np.ndarray):
        channel = ComplexChannel(channel)
    U, R = channel.num_users, channel.num_antennas
    if (U, R) != (sys.num_users, sys.num_antennas):
        raise ValueError(
            f"channel is {U}x{R} but system expects "
            f"{sys.num_users}x{sys.num_antennas}")
    s = np.asarray(s, dtype=complex)
    if s.shape != (U,):
        raise ValueError(f"symbol vector must have length {U}")

    h_stacked = channel.real_stacked
    if cache is None:
        cache = build_cache(h_stacked)
    s_stacked = stack_real(s)
    c = reg_coefficient(U, sys.noise_variance, sys.total_power)
    phi = cache.phi
    lam_bar = lambda_target(phi, c, cfg.margin)
    if lam_bar <= 0.0:  # zero channel and zero noise; any positive penalty works
        lam_bar = 1.0
    lam_init = lam_bar / cfg.continuation.lambda_init_divisor
    growth = cfg.continuation.growth_factor

    n = 2 * R
    v = np.zeros(n)
    u = np.zeros(n)
    w = np.zeros(n)
    gaps = []
    lagr = []
    lams = []
    lam = lam_init
    for k in range(cfg.max_iters):
        lam = min(lam_bar, lam_init * growth ** k)
        u_new = project_omega(v - w / lam)
        v_new = v_update(cache, s_stacked, u_new, w, c, lam)
        w = w - lam * (v_new - u_new)
        dv = _rel_gap(v_new, v)
        du = _rel_gap(u_new, u)
        v, u = v_new, u_new
        gaps.append((dv, du))
        lams.append(lam)
        lagr.append(augmented_lagrangian(h_stacked, s_stacked, v, u, w, c, lam))
        if lam >= lam_bar and dv < cfg.rel_tol and du < cfg.rel_tol:
            break

    iters_used = len(gaps)
    z_real = sys.kappa * sign_pos(u)
    z = unstack_vector(z_real)
    rho = genie_rho(channel.entries, s, z, U, sys.noise_variance)
    state = AdmmState(v_tilde=v, u=u, w=w, lam=lam,
                     lagrangian=lagr[-1], iteration=iters_used)
    return PrecodeOutput(
        z=z, rho=rho, iters_used=iters_used,
        gap_history=np.array(gaps),
        lagrangian_trace=np.array(lagr),
        lambda_trace=np.array(lams),
        lambda_target=lam_bar, phi=phi, final_state=state)


def stationarity_residual(state: AdmmState, h_stacked: np.ndarray,
                          s_stacked: np.ndarray, c: float) -> float:
    """Computable surrogate for the distance of 0 to the Lagrangian
    subdifferential at the current iterates."""
    grad = (2.0 * (h_stacked.T @ (h_stacked @ state.v_tilde) + c * state.v_tilde)
            - 2.0 * (h_stacked.T @ s_stacked) - state.w)
    return float(np.linalg.norm(grad) + np.linalg.norm(state.v_tilde - state.u))
