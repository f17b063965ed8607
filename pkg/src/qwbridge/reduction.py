"""
Adiabatic elimination of the strongly damped read-out modes.

When modes 1 and 4 relax much faster than anything else, their amplitudes
follow modes 2 and 3 instantaneously and can be integrated out.  What
remains is a two-mode model: a complex-symmetric 2x2 drift whose
off-diagonal carries the bridge couplings, plus an effective noise map
feeding the original bath inputs into the surviving modes.  At the balance
point the drift acquires an exactly pure-imaginary eigenvalue whose
eigenvector is the dark mode; everything measurable at long times lives in
that eigenpair.

The reduction drops the detuning-dependent denominators (resonant
approximation); outside the strong-damping regime the full model in
:mod:`qwbridge.dynamics` is the reference instead.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import NotBalancedError, OutOfRegimeError
from .network import BridgeConfig, DriftModel, quadrature_drift

__all__ = [
    "ReducedNoiseChannel",
    "ReducedModel",
    "BalancedEigenvalues",
    "EnvelopeExpansion",
    "adiabatic_reduce",
    "balanced_eigenvalues",
    "longtime_mean",
    "envelope_coefficients",
    "envelope_expansion",
]

#: A validity ratio below this triggers the adiabaticity warning flag.
_VALIDITY_WARN_RATIO = 10.0

#: Absolute bound on |Re E| for an eigenvalue to count as the dark one.
DARK_RE_TOL = 1e-9


@dataclass(frozen=True)
class ReducedNoiseChannel:
    """One input noise feeding the reduced modes: ``coeffs`` are the complex
    amplitudes with which it enters (A2_in, A3_in)."""

    name: str
    coeffs: tuple[complex, complex]
    occupation: float
    kind: str  # 'loss' couples an annihilation operator, 'gain' a creation one


@dataclass(frozen=True)
class ReducedModel:
    """Effective two-mode model for modes 2 and 3 after elimination."""

    m2: NDArray[np.complex128]
    channels: tuple[ReducedNoiseChannel, ...]
    validity: float
    validity_warning: bool

    def diffusion(self) -> NDArray[np.float64]:
        """Quadrature diffusion for (q2, q3, p2, p3) from the noise map.

        With K_jl = sum_loss c_j c_l^* (N+1) and
        L_jl = sum_loss c_j^* c_l N + sum_gain g_j^* g_l the blocks are
        D_qq = D_pp = Re(K + L) and D_qp = Im(L - K).
        """
        k = np.zeros((2, 2), dtype=complex)
        ell = np.zeros((2, 2), dtype=complex)
        for ch in self.channels:
            c = np.array(ch.coeffs, dtype=complex)
            outer = np.outer(c, c.conj())
            if ch.kind == "loss":
                k += outer * (ch.occupation + 1.0)
                ell += outer.conj() * ch.occupation
            else:
                ell += outer.conj()
        dqq = (k + ell).real
        dqp = (ell - k).imag
        return np.block([[dqq, dqp], [dqp.T, dqq]])

    def drift_model(self) -> DriftModel:
        return DriftModel(
            m_complex=self.m2,
            m_quad=quadrature_drift(self.m2),
            diffusion=self.diffusion(),
        )


def reduced_drift(config: BridgeConfig) -> NDArray[np.complex128]:
    """The complex-symmetric 2x2 drift of the eliminated-mode model.

    Diagonals carry -i*omega minus the bath-induced widths J^2/kappa and
    the net local loss kappa_j - gamma_j of modes 2/3; the off-diagonal
    combines the direct coupling j0 with the bath-mediated ones.
    """
    c = config
    off = -1j * c.j0 - c.j1 * c.j2 / c.kappa1 - c.j3 * c.jx / c.kappa4
    return np.array(
        [
            [-1j * c.omega2 - c.j1**2 / c.kappa1 - c.j3**2 / c.kappa4 - (c.kappa2 - c.gamma2), off],
            [off, -1j * c.omega3 - c.j2**2 / c.kappa1 - c.jx**2 / c.kappa4 - (c.kappa3 - c.gamma3)],
        ],
        dtype=complex,
    )


def adiabatic_reduce(config: BridgeConfig) -> ReducedModel:
    """Eliminate modes 1 and 4, returning drift, noise map and diagnostics.

    The validity ratio min(kappa1, kappa4)/max|omega_i - omega_j| quantifies
    the resonant approximation; a low ratio sets the warning flag but is not
    an error (the full-model oracle covers that regime).
    """
    c = config
    n1, n4 = c.occupations
    pref = -1j * np.sqrt(2.0)
    channels = [
        ReducedNoiseChannel(
            "a1_in",
            (pref * c.j1 / np.sqrt(c.kappa1), pref * c.j2 / np.sqrt(c.kappa1)),
            n1,
            "loss",
        ),
        ReducedNoiseChannel(
            "a4_in",
            (pref * c.j3 / np.sqrt(c.kappa4), pref * c.jx / np.sqrt(c.kappa4)),
            n4,
            "loss",
        ),
    ]
    if c.kappa2 > 0.0:
        channels.append(ReducedNoiseChannel("a2_in", (np.sqrt(2.0 * c.kappa2), 0.0), 0.0, "loss"))
    if c.gamma2 > 0.0:
        channels.append(ReducedNoiseChannel("d2_in_dag", (-np.sqrt(2.0 * c.gamma2), 0.0), 0.0, "gain"))
    if c.kappa3 > 0.0:
        channels.append(ReducedNoiseChannel("a3_in", (0.0, np.sqrt(2.0 * c.kappa3)), 0.0, "loss"))
    if c.gamma3 > 0.0:
        channels.append(ReducedNoiseChannel("d3_in_dag", (0.0, -np.sqrt(2.0 * c.gamma3)), 0.0, "gain"))

    omegas = config.omegas
    dmax = max(abs(omegas[i] - omegas[j]) for i in range(4) for j in range(i + 1, 4))
    ratio = float("inf") if dmax == 0.0 else min(c.kappa1, c.kappa4) / dmax
    return ReducedModel(
        m2=reduced_drift(config),
        channels=tuple(channels),
        validity=ratio,
        validity_warning=ratio < _VALIDITY_WARN_RATIO,
    )


@dataclass(frozen=True)
class BalancedEigenvalues:
    """Numerical eigenpair of the reduced drift at balance, next to the
    closed-form values kept for cross-checking.

    ``dark_printed`` follows the published formula verbatim; on detuned
    bridges it reproduces the imaginary part of the *damped* eigenvalue
    instead of the dark one, which the ``printed_formula_mismatch`` flag
    surfaces (the frequency-swapped variant ``dark_swapped`` matches).  The
    numerical values are authoritative.
    """

    dark: complex
    damped: complex
    dark_printed: complex
    dark_swapped: complex | None
    damped_printed: complex
    printed_formula_mismatch: bool


def balanced_eigenvalues(config: BridgeConfig) -> BalancedEigenvalues:
    """Eigenvalues of the reduced drift for a balanced bridge.

    The dark eigenvalue is selected as argmin |Re E| and must be pure
    imaginary to within ``DARK_RE_TOL``; otherwise the bridge is declared
    unbalanced.
    """
    m2 = reduced_drift(config)
    ev = np.linalg.eigvals(m2)
    order = sorted(range(2), key=lambda i: (abs(ev[i].real), -abs(ev[i].imag)))
    dark, damped = ev[order[0]], ev[order[1]]
    if abs(dark.real) > DARK_RE_TOL:
        raise NotBalancedError(
            f"no pure-imaginary eigenvalue: Re E = {dark.real:.3e} "
            f"(jx = {config.jx}, balance at {config.balance_jx})"
        )
    c = config
    if c.symmetric_arms:
        dark_printed = 1j * (c.j0 - c.omega3)
        damped_printed = dark_printed - 2.0 * c.j1**2 / c.kappa1 - 2.0 * c.j3**2 / c.kappa4
        dark_swapped = None
    else:
        denom = c.j1**2 - c.j2**2
        dark_printed = -1j * (c.j1**2 * c.omega2 - c.j2**2 * c.omega3) / denom
        dark_swapped = -1j * (c.j1**2 * c.omega3 - c.j2**2 * c.omega2) / denom
        damped_printed = (
            -(c.j1**2 + c.j2**2) * (c.j3**2 * c.kappa1 + c.j1**2 * c.kappa4)
            / (c.j1**2 * c.kappa1 * c.kappa4)
            + dark_printed
        )
    scale = max(abs(dark), 1.0)
    mismatch = abs(dark.imag - dark_printed.imag) > 1e-6 * scale
    return BalancedEigenvalues(
        dark=complex(dark),
        damped=complex(damped),
        dark_printed=dark_printed,
        dark_swapped=dark_swapped,
        damped_printed=damped_printed,
        printed_formula_mismatch=bool(mismatch),
    )


def longtime_mean(
    config: BridgeConfig,
    mean0_2: complex,
    mean0_3: complex,
    t: float,
) -> tuple[complex, complex]:
    """Long-time amplitudes of modes 2 and 3 on a balanced bridge.

    Only the dark-mode projection of the initial amplitudes survives:

        <a2(t)> = e^{E t} j2 (j2 <a2(0)> - j1 <a3(0)>) / (j1^2 + j2^2)
        <a3(t)> = e^{E t} j1 (j1 <a3(0)> - j2 <a2(0)>) / (j1^2 + j2^2)

    with E the numerically computed dark eigenvalue.
    """
    e_dark = balanced_eigenvalues(config).dark
    phase = cmath.exp(e_dark * t)
    n2 = config.j1**2 + config.j2**2
    proj = config.j2 * mean0_2 - config.j1 * mean0_3
    a2 = phase * config.j2 * proj / n2
    a3 = -phase * config.j1 * proj / n2
    return a2, a3


@dataclass(frozen=True)
class EnvelopeExpansion:
    """Second-order coefficients of the near-balance envelope for symmetric
    arms: the slow eigenvalue moves as E(y) = E(0) - gamma_coeff * y^2 and
    the dark projection tilts linearly with lambda_coeff."""

    gamma_coeff: complex
    lambda_coeff: complex
    y: float


def envelope_coefficients(config: BridgeConfig, y: float = 0.0) -> EnvelopeExpansion:
    """Expansion coefficients for j1 = j2, omega2 = omega3 around y = jx - j3."""
    c = config
    if not c.symmetric_arms:
        raise OutOfRegimeError("envelope expansion requires j1 = j2")
    if c.omega2 != c.omega3:
        raise OutOfRegimeError("envelope expansion requires omega2 = omega3")
    denom = c.j3**2 * c.kappa1 + c.j2**2 * c.kappa4 + 1j * c.j0 * c.kappa1 * c.kappa4
    gamma = (c.j2**2 + 1j * c.j0 * c.kappa1) / (2.0 * denom)
    lam = c.j3 * c.kappa1 / denom
    return EnvelopeExpansion(gamma_coeff=gamma, lambda_coeff=lam, y=y)


def envelope_expansion(
    config: BridgeConfig,
    y: float,
    t: float,
    mean0: tuple[complex, complex],
) -> tuple[complex, complex]:
    """Near-balance amplitudes to second order in the detuning y = jx - j3.

    Valid for symmetric arms with |y| < 1 and t beyond the bright-sector
    relaxation; higher orders are dropped:

        <a2(t)> =  (1/2) e^{E t - G y^2 t} ((1 + L y) <a2(0)> - <a3(0)>)
        <a3(t)> = -(1/2) e^{E t - G y^2 t} (<a2(0)> - (1 - L y) <a3(0)>)
    """
    if abs(y) >= 1.0:
        raise OutOfRegimeError(
            f"|y| = {abs(y)} >= 1: off-balance amplitudes decay too fast for the expansion"
        )
    coeff = envelope_coefficients(config, y)
    e_dark = 1j * (config.j0 - config.omega3)
    decay = cmath.exp(e_dark * t - coeff.gamma_coeff * y * y * t)
    m2_0, m3_0 = mean0
    a2 = 0.5 * decay * ((1.0 + coeff.lambda_coeff * y) * m2_0 - m3_0)
    a3 = -0.5 * decay * (m2_0 - (1.0 - coeff.lambda_coeff * y) * m3_0)
    return a2, a3
