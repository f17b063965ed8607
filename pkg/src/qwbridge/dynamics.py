"""
Exact moment propagation for the full four-mode linear model.

For a linear drift with delta-correlated Gaussian noise the first and
second moments close on themselves, so no trajectory sampling is needed:
means evolve as exp(M t) and the covariance obeys
dC/dt = A C + C A^T + D.  Both are integrated in closed form through the
eigendecomposition of the drift, with a scaling-and-squaring fallback on
an augmented block matrix when the drift is close to defective.  This
module is the brute-force oracle every reduced or analytic result is
validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm

from .network import BridgeConfig, DriftModel, build_drift

__all__ = [
    "GaussianMoments",
    "symplectic_form",
    "uncertainty_min_eig",
    "relaxation_time",
    "evolve_mean",
    "evolve_covariance",
    "oracle_moments",
    "oracle_signal",
]

#: Condition-number threshold above which the eigendecomposition propagator
#: falls back to scaling-and-squaring.
_EIG_COND_MAX = 1e9

#: Covariance block ordering for modes 2 and 3 within the 8-dim quadrature
#: space (q1..q4, p1..p4): picks (q2, q3, p2, p3).
REDUCED_BLOCK = (1, 2, 5, 6)


def symplectic_form(n_modes: int) -> NDArray[np.float64]:
    """Symplectic form for quadratures ordered (q1..qn, p1..pn): [X_i, X_j] = 2i Omega_ij."""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


def uncertainty_min_eig(cov: NDArray[np.float64]) -> float:
    """Minimum eigenvalue of C + i*Omega; >= 0 (to tolerance) for physical states."""
    n = cov.shape[0] // 2
    return float(np.linalg.eigvalsh(cov + 1j * symplectic_form(n)).min())


@dataclass(frozen=True)
class GaussianMoments:
    """First moments (complex amplitude per mode) and symmetrized quadrature
    covariance C_ij = <{dX_i, dX_j}>/2 in the (q1..qn, p1..pn) ordering."""

    mean: NDArray[np.complex128]
    cov: NDArray[np.float64]

    @property
    def n_modes(self) -> int:
        return len(self.mean)

    @property
    def quadrature_mean(self) -> NDArray[np.float64]:
        """(<q1>..<qn>, <p1>..<pn>) = (2 Re<a>, 2 Im<a>)."""
        return np.concatenate([2.0 * self.mean.real, 2.0 * self.mean.imag])

    def check_physical(self, tol: float = 1e-9) -> None:
        asym = np.max(np.abs(self.cov - self.cov.T))
        if asym > tol:
            raise ValueError(f"covariance asymmetry {asym:.2e} exceeds {tol:.1e}")
        w = uncertainty_min_eig(self.cov)
        if w < -tol:
            raise ValueError(f"uncertainty principle violated: min eig(C + i Omega) = {w:.2e}")


def relaxation_time(config: BridgeConfig) -> float:
    """Bright-sector relaxation scale tau = 1/(2 j1^2/kappa1 + 2 j3^2/kappa4).

    Adopted globally as the reference timescale; the damped reduced
    eigenvalue equals -1/tau for symmetric arms and stays of that order
    otherwise.
    """
    return 1.0 / (2.0 * config.j1**2 / config.kappa1 + 2.0 * config.j3**2 / config.kappa4)


def _propagator(m: NDArray[np.complex128], t: float) -> NDArray[np.complex128]:
    """exp(m t) via eigendecomposition, falling back to expm when ill-conditioned."""
    lam, v = np.linalg.eig(m)
    cond = np.linalg.cond(v)
    if not math.isfinite(cond) or cond > _EIG_COND_MAX:
        return expm(m * t)
    return v @ (np.exp(lam * t)[:, None] * np.linalg.inv(v))


def evolve_mean(
    model: DriftModel,
    mean0: NDArray[np.complex128],
    t: float,
) -> NDArray[np.complex128]:
    """Noise-averaged first moments exp(M t) mean0 (input noises average to zero)."""
    mean0 = np.asarray(mean0, dtype=complex)
    if not math.isfinite(t) or t < 0.0:
        raise ValueError(f"time must be finite and >= 0, got {t}")
    if not np.all(np.isfinite(mean0)):
        raise ValueError("mean0 contains non-finite entries")
    if t == 0.0:
        return mean0.copy()
    return _propagator(model.m_complex, t) @ mean0


def _phi1(s: complex, t: float) -> complex:
    """(exp(s t) - 1)/s, series-expanded near s = 0 (marginal dark modes)."""
    st = s * t
    if abs(st) < 1e-7:
        return t * (1.0 + st / 2.0 + st * st / 6.0)
    return (np.exp(st) - 1.0) / s


def _evolve_cov_eig(
    a: NDArray[np.float64],
    d: NDArray[np.float64],
    cov0: NDArray[np.float64],
    t: float,
) -> NDArray[np.float64] | None:
    lam, v = np.linalg.eig(a.astype(complex))
    if np.linalg.cond(v) > _EIG_COND_MAX:
        return None
    vi = np.linalg.inv(v)
    c0t = vi @ cov0 @ vi.T
    dt = vi @ d @ vi.T
    s = lam[:, None] + lam[None, :]
    grow = np.exp(s * t)
    phi = np.empty_like(s)
    it = np.nditer(s, flags=["multi_index"])
    for val in it:
        phi[it.multi_index] = _phi1(complex(val), t)
    ct = grow * c0t + phi * dt
    return (v @ ct @ v.T).real


def _evolve_cov_vanloan(
    a: NDArray[np.float64],
    d: NDArray[np.float64],
    cov0: NDArray[np.float64],
    t: float,
) -> NDArray[np.float64]:
    # exp of [[A, D], [0, -A^T]] grows like exp(+||A|| dt); keep chunks small
    n = a.shape[0]
    norm = np.linalg.norm(a, 2)
    steps = max(1, math.ceil(t * norm / 10.0))
    dt = t / steps
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = a
    block[:n, n:] = d
    block[n:, n:] = -a.T
    e = expm(block * dt)
    f, g = e[:n, :n], e[:n, n:]
    q = g @ f.T  # integral of e^{A s} D e^{A^T s} over one chunk
    cov = cov0
    for _ in range(steps):
        cov = f @ cov @ f.T + q
    return cov


def evolve_covariance(
    model: DriftModel,
    cov0: NDArray[np.float64],
    t: float,
) -> NDArray[np.float64]:
    """Propagate the quadrature covariance: dC/dt = A C + C A^T + D.

    Closed form through the eigendecomposition of A; the inhomogeneous term
    uses (exp((l_i + l_j) t) - 1)/(l_i + l_j) with the series limit on the
    marginal (dark-mode) pairs, so balanced bridges need no singular
    steady-state solve.
    """
    cov0 = np.asarray(cov0, dtype=float)
    if not math.isfinite(t) or t < 0.0:
        raise ValueError(f"time must be finite and >= 0, got {t}")
    if t == 0.0:
        return cov0.copy()
    cov = _evolve_cov_eig(model.m_quad, model.diffusion, cov0, t)
    if cov is None:
        cov = _evolve_cov_vanloan(model.m_quad, model.diffusion, cov0, t)
    asym = np.max(np.abs(cov - cov.T))
    scale = max(1.0, float(np.max(np.abs(cov))))
    if asym > 1e-10 * scale:
        raise RuntimeError(f"covariance propagation lost symmetry: {asym:.2e}")
    return 0.5 * (cov + cov.T)


def oracle_moments(config: BridgeConfig, alpha: float, t: float) -> GaussianMoments:
    """Full-model moments at time t from the initial state |0> |alpha> |0> |0>."""
    model = build_drift(config)
    mean0 = np.array([0.0, alpha, 0.0, 0.0], dtype=complex)
    mean = evolve_mean(model, mean0, t)
    cov = evolve_covariance(model, np.eye(8), t)
    return GaussianMoments(mean=mean, cov=cov)


def oracle_signal(
    config: BridgeConfig, alpha: float, t: float
) -> tuple[complex, complex, NDArray[np.float64]]:
    """First moments of modes 2, 3 and their (q2, q3, p2, p3) covariance block."""
    moments = oracle_moments(config, alpha, t)
    block = moments.cov[np.ix_(REDUCED_BLOCK, REDUCED_BLOCK)]
    return complex(moments.mean[1]), complex(moments.mean[2]), block
