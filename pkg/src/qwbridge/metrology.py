"""
Measurement precision of the unknown coupling.

Two routes to the uncertainty of jx.  Error propagation of a homodyne
signal, delta = sqrt(Var X)/|d<X>/dJx|, with the derivative either from the
closed-form near-balance expressions or from central differences on the
full-model oracle.  And the Gaussian quantum Fisher information with its
Cramer-Rao bound, where the coefficient g <= 1 measures how close homodyne
detection comes to the optimal measurement.

Homodyne convention: X_phi = a e^{-i phi} + a^dag e^{i phi}, so
<X_phi> = 2 Re[<a> e^{-i phi}] and the optimal angle equals the phase of
the signal derivative (mod pi).  The published formulas carry the angle
inside cos(...) with the opposite sign; optimal values are unaffected.

Purity convention: P = 1/sqrt(det C), which assigns purity 1 to the vacuum
under this package's covariance normalization.  The purity terms of the
Fisher information vanish identically here anyway, since the balanced
covariance does not depend on jx at fixed bath occupations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from .dynamics import oracle_signal, relaxation_time
from .errors import NotBalancedError, OutOfRegimeError
from .network import BridgeConfig
from .reduction import balanced_eigenvalues, envelope_coefficients

__all__ = [
    "FluctuationParams",
    "PrecisionReport",
    "quantum_fluctuations",
    "mu_coefficient",
    "optimality_gap",
    "delta_optimal_symmetric",
    "delta_optimal_general",
    "optimal_homodyne_phase",
    "homodyne_precision",
    "optimal_homodyne_precision",
    "balanced_covariance",
    "mean_derivative_vector",
    "gaussian_qfi",
    "crb_bound",
    "precision_report",
]

#: |cos| below this counts as a vanishing signal derivative (infinite delta).
_COS_TOL = 1e-12


@dataclass(frozen=True)
class FluctuationParams:
    """Thermal fluctuation numbers entering the precision formulas.

    ``f`` drives the symmetric-arm (j1 = j2) homodyne variance, ``f_c`` the
    general branch and the balanced covariance, and ``f_c_prime`` adds the
    diffusion of gain-compensated losses on modes 2/3.
    """

    f: float
    f_c: float
    f_c_prime: float


def quantum_fluctuations(config: BridgeConfig) -> FluctuationParams:
    c = config
    n1, n4 = c.occupations
    wsum = c.j1**2 * c.kappa4 + c.j3**2 * c.kappa1
    f = (c.j1**2 * n1 * c.kappa4 + c.j3**2 * n4 * c.kappa1) / wsum
    f_c = 2.0 * (c.j1**2 * n1 * c.kappa4 + c.j3**2 * n4 * c.kappa1) / (
        wsum * (c.j1**2 + c.j2**2)
    )
    f_c_prime = f_c + c.kappa1 * c.kappa2 * c.kappa4 / (2.0 * wsum)
    return FluctuationParams(f=f, f_c=f_c, f_c_prime=f_c_prime)


def mu_coefficient(config: BridgeConfig) -> complex:
    """mu = (j1^2 + j2^2)^2 (j3^2 kappa1 + j1^2 kappa4 + i j0 j1 kappa1 kappa4 / j2)."""
    c = config
    return (c.j1**2 + c.j2**2) ** 2 * (
        c.j3**2 * c.kappa1 + c.j1**2 * c.kappa4 + 1j * c.j0 * c.j1 * c.kappa1 * c.kappa4 / c.j2
    )


def optimality_gap(j1: float, j2: float, f_c: float) -> float:
    """g = 2 j2 sqrt((1+f_c) j1^2 + f_c j2^2) / ((j1^2 + j2^2)(1 + f_c)); g <= 1."""
    return 2.0 * j2 * math.sqrt((1.0 + f_c) * j1**2 + f_c * j2**2) / (
        (j1**2 + j2**2) * (1.0 + f_c)
    )


def delta_optimal_symmetric(
    j2: float, j3: float, j0: float, kappa1: float, kappa4: float, alpha: float, f: float
) -> float:
    """Phase-optimized homodyne uncertainty for j1 = j2 (closed form)."""
    root = math.hypot(j3**2 * kappa1 + j2**2 * kappa4, j0 * kappa1 * kappa4)
    return math.sqrt(1.0 + f) * root / (j3 * kappa1 * alpha)


def delta_optimal_general(
    j1: float, j2: float, j3: float, j0: float,
    kappa1: float, kappa4: float, alpha: float, f_c: float,
) -> float:
    """Phase-optimized homodyne uncertainty for arbitrary j1, j2 (closed form)."""
    mu = (j1**2 + j2**2) ** 2 * (
        j3**2 * kappa1 + j1**2 * kappa4 + 1j * j0 * j1 * kappa1 * kappa4 / j2
    )
    return math.sqrt(1.0 + f_c) * abs(mu) / (4.0 * j1**3 * j2 * j3 * kappa1 * alpha)


def _require_balanced(config: BridgeConfig) -> None:
    if not config.is_balanced():
        raise NotBalancedError(
            f"jx = {config.jx} is off the balance point {config.balance_jx} "
            "(or the dark-mode detuning constraint fails)"
        )


def _effective_fluctuations(config: BridgeConfig) -> tuple[float, float]:
    """(f, f_c) with the gain-compensated loss increment of modes 2/3 folded in.

    The closed-form noise budget covers local losses only when each is
    exactly compensated (kappa_j = gamma_j) and symmetric (kappa2 = kappa3),
    matching the regime the bound was derived for.
    """
    fp = quantum_fluctuations(config)
    lossy = any(v > 0.0 for v in (config.kappa2, config.kappa3, config.gamma2, config.gamma3))
    if not lossy:
        return fp.f, fp.f_c
    if not config.gain_compensated:
        raise OutOfRegimeError(
            "analytic precision formulas need gain-compensated losses (kappa_j = gamma_j)"
        )
    if config.kappa2 != config.kappa3:
        raise OutOfRegimeError("analytic precision formulas assume kappa2 = kappa3")
    increment = fp.f_c_prime - fp.f_c
    return fp.f + increment, fp.f_c_prime


def _signal_derivative(config: BridgeConfig, t: float, alpha: float, y: float) -> complex:
    """d<a2(t)>/dJx near balance for the initial amplitudes (alpha, 0)."""
    c = config
    if c.symmetric_arms:
        if abs(y) >= 1.0:
            raise OutOfRegimeError(f"|y| = {abs(y)} >= 1 is outside the expansion window")
        coeff = envelope_coefficients(c)
        gam, lam = coeff.gamma_coeff, coeff.lambda_coeff
        e_dark = 1j * (c.j0 - c.omega3)
        bracket = lam - 2.0 * gam * y * t * (1.0 + lam * y)
        return 0.5 * alpha * bracket * cmath.exp(e_dark * t - gam * y * y * t)
    if y != 0.0:
        raise OutOfRegimeError(
            "no closed-form off-balance derivative for j1 != j2; use derivative='oracle'"
        )
    e_dark = balanced_eigenvalues(c).dark
    mu = mu_coefficient(c)
    return 2.0 * c.j1**3 * c.j2 * c.j3 * c.kappa1 * alpha * cmath.exp(e_dark * t) / mu


def optimal_homodyne_phase(config: BridgeConfig, t: float) -> float:
    """Measurement angle maximizing |d<X_phi>/dJx| at time t (mod pi).

    Tracks the dark-mode phase, so it drifts linearly in t; phase-locking
    the local oscillator to that rotation is part of the protocol.
    """
    _require_balanced(config)
    return math.remainder(cmath.phase(_signal_derivative(config, t, 1.0, 0.0)), math.pi)


def homodyne_precision(
    config: BridgeConfig,
    phi2: float | None,
    t: float,
    alpha: float,
    y: float = 0.0,
    derivative: str = "analytic",
) -> float:
    """Uncertainty of jx from homodyne detection of mode 2 at time t.

    The bridge described by ``config`` must be balanced; ``y`` offsets the
    operating coupling to jx + y.  ``phi2`` is the measurement angle
    (``None`` selects the optimal one).  With ``derivative="analytic"`` the
    signal slope comes from the near-balance closed forms and the variance
    from the fluctuation numbers; ``derivative="oracle"`` uses central
    differences on the full four-mode model and the simulated covariance,
    which also covers j1 != j2 off balance.

    Returns ``math.inf`` when the chosen angle extinguishes the signal
    derivative.
    """
    _require_balanced(config)
    if derivative == "analytic":
        f_eff, fc_eff = _effective_fluctuations(config)
        der = _signal_derivative(config, t, alpha, y)
        noise = math.sqrt(1.0 + (f_eff if config.symmetric_arms else fc_eff))
        if der == 0.0:
            return math.inf
        if phi2 is None:
            slope = 2.0 * abs(der)
        else:
            slope = abs(2.0 * (der * cmath.exp(-1j * phi2)).real)
            if slope < _COS_TOL * 2.0 * abs(der):
                return math.inf
        return noise / slope

    if derivative == "oracle":
        step = 1e-4 * config.j3
        jx_op = config.jx + y
        a2_plus, _, _ = oracle_signal(replace(config, jx=jx_op + step), alpha, t)
        a2_minus, _, _ = oracle_signal(replace(config, jx=jx_op - step), alpha, t)
        der = (a2_plus - a2_minus) / (2.0 * step)
        _, _, cov = oracle_signal(replace(config, jx=jx_op), alpha, t)
        if der == 0.0:
            return math.inf
        phi = cmath.phase(der) if phi2 is None else phi2
        # Var(X_phi) of mode 2 from the (q2, q3, p2, p3) block
        variance = (
            math.cos(phi) ** 2 * cov[0, 0]
            + math.sin(phi) ** 2 * cov[2, 2]
            + 2.0 * math.cos(phi) * math.sin(phi) * cov[0, 2]
        )
        slope = abs(2.0 * (der * cmath.exp(-1j * phi)).real)
        if slope < _COS_TOL * 2.0 * abs(der):
            return math.inf
        return math.sqrt(variance) / slope

    raise ValueError(f"derivative must be 'analytic' or 'oracle', got {derivative!r}")


def optimal_homodyne_precision(config: BridgeConfig, alpha: float) -> float:
    """Phase-optimized homodyne uncertainty at the balance point (closed form)."""
    _require_balanced(config)
    f_eff, fc_eff = _effective_fluctuations(config)
    c = config
    if c.symmetric_arms:
        return delta_optimal_symmetric(c.j2, c.j3, c.j0, c.kappa1, c.kappa4, alpha, f_eff)
    return delta_optimal_general(c.j1, c.j2, c.j3, c.j0, c.kappa1, c.kappa4, alpha, fc_eff)


def balanced_covariance(config: BridgeConfig) -> NDArray[np.float64]:
    """Published balanced steady covariance in the (q2, q3, p2, p3) ordering.

    Rank-one thermal excess on top of vacuum: diagonal 1 + f_c and
    1 + f_c (j2/j1)^2, off-diagonal f_c j2/j1, identical q and p blocks.
    """
    _, fc_eff = _effective_fluctuations(config)
    r = config.j2 / config.j1
    block = np.array([[1.0 + fc_eff, fc_eff * r], [fc_eff * r, 1.0 + fc_eff * r**2]])
    cov = np.zeros((4, 4))
    cov[:2, :2] = block
    cov[2:, 2:] = block
    return cov


def mean_derivative_vector(
    config: BridgeConfig, alpha: float, t: float = 0.0
) -> NDArray[np.float64]:
    """d<X>/dJx for X = (q2, q3, p2, p3) at the balance point.

    The angle phi combines the mu phase with the dark-mode rotation at
    time t; rotating phi moves weight between the q and p components
    without changing any phase-insensitive contraction.
    """
    _require_balanced(config)
    c = config
    mu = mu_coefficient(c)
    e_dark = balanced_eigenvalues(c).dark
    phi = -cmath.phase(mu) + e_dark.imag * t
    pref = alpha * c.j1**2 * c.j3 * c.kappa1 / abs(mu)
    return pref * np.array(
        [
            4.0 * c.j1 * c.j2 * math.cos(phi),
            2.0 * (c.j2**2 - c.j1**2) * math.cos(phi),
            4.0 * c.j1 * c.j2 * math.sin(phi),
            2.0 * (c.j2**2 - c.j1**2) * math.sin(phi),
        ]
    )


def gaussian_qfi(config: BridgeConfig, alpha: float, mode: str = "dominant") -> float:
    """Quantum Fisher information of jx in the balanced long-time state.

    ``mode="dominant"`` evaluates the strong-probe closed form

        F = (alpha j1^2 j3 kappa1 / |mu|)^2
            * 4 (1+f_c) j1^2 (j1^2+j2^2)^2 / ((1+f_c) j1^2 + f_c j2^2).

    ``mode="full"`` assembles the general Gaussian expression from the
    covariance and mean-derivative explicitly; the covariance-derivative
    and purity terms vanish identically here (C does not depend on jx at
    fixed bath occupations), so this serves as a numerical cross-check of
    the closed form.
    """
    _require_balanced(config)
    _, fc_eff = _effective_fluctuations(config)
    c = config
    if mode == "dominant":
        pref = (alpha * c.j1**2 * c.j3 * c.kappa1 / abs(mu_coefficient(c))) ** 2
        n2 = c.j1**2 + c.j2**2
        return pref * 4.0 * (1.0 + fc_eff) * c.j1**2 * n2**2 / (
            (1.0 + fc_eff) * c.j1**2 + fc_eff * c.j2**2
        )
    if mode == "full":
        cov = balanced_covariance(c)
        det = np.linalg.det(cov)
        if det <= 0.0:
            raise ValueError(f"covariance is singular (det = {det})")
        dcov = np.zeros_like(cov)  # C is jx-independent at fixed occupations
        cinv_dcov = np.linalg.solve(cov, dcov)
        trace_term = np.trace(cinv_dcov @ cinv_dcov)
        purity = 1.0 / math.sqrt(det)
        dpurity = -0.5 * purity * np.trace(cinv_dcov)
        xprime = mean_derivative_vector(c, alpha)
        quad = float(xprime @ np.linalg.solve(cov, xprime))
        return (
            trace_term / (2.0 * (1.0 + purity**2))
            + 2.0 * dpurity**2 / (1.0 - purity**4 + np.finfo(float).tiny)
            + quad
        )
    raise ValueError(f"mode must be 'dominant' or 'full', got {mode!r}")


def crb_bound(config: BridgeConfig, alpha: float) -> tuple[float, float]:
    """Cramer-Rao lower bound on delta jx and the optimality coefficient g.

    bound = g sqrt(1+f_c) |mu| / (4 j1^3 j2 j3 kappa1 alpha), with f_c
    replaced by its gain-compensated extension when modes 2/3 are lossy.
    Equals 1/sqrt(F) for the dominant-term Fisher information; g = 1 exactly
    when j2^2 = (1+f_c)/(1-f_c) j1^2 (possible only for f_c < 1).
    """
    _require_balanced(config)
    _, fc_eff = _effective_fluctuations(config)
    c = config
    g = optimality_gap(c.j1, c.j2, fc_eff)
    bound = g * math.sqrt(1.0 + fc_eff) * abs(mu_coefficient(c)) / (
        4.0 * c.j1**3 * c.j2 * c.j3 * c.kappa1 * alpha
    )
    return bound, g


@dataclass(frozen=True)
class PrecisionReport:
    """Summary of all precision figures at one operating point."""

    delta_homodyne: float
    delta_homodyne_optimal: float
    qfi: float
    crb: float
    g: float


def precision_report(
    config: BridgeConfig,
    alpha: float,
    t: float | None = None,
    phi2: float | None = None,
    y: float = 0.0,
) -> PrecisionReport:
    """Evaluate homodyne and Fisher-information precision in one shot."""
    if t is None:
        t = 10.0 * relaxation_time(config)
    delta = homodyne_precision(config, phi2, t, alpha, y)
    delta_opt = optimal_homodyne_precision(config, alpha)
    qfi = gaussian_qfi(config, alpha)
    bound, g = crb_bound(config, alpha)
    return PrecisionReport(
        delta_homodyne=delta,
        delta_homodyne_optimal=delta_opt,
        qfi=qfi,
        crb=bound,
        g=g,
    )
