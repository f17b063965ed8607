"""Full-model moment propagation: the oracle itself must be trustworthy."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from qwbridge import (
    BridgeConfig,
    DriftModel,
    build_drift,
    evolve_covariance,
    evolve_mean,
    oracle_moments,
    oracle_signal,
    relaxation_time,
    uncertainty_min_eig,
)
from qwbridge.network import quadrature_drift

from conftest import ALPHA_REF


class TestEvolveMean:
    def test_time_zero_identity(self, fig3):
        model = build_drift(fig3)
        mean0 = np.array([1 + 2j, 3 - 1j, 0.5j, -2.0])
        assert np.array_equal(evolve_mean(model, mean0, 0.0), mean0)

    def test_free_evolution_phase(self):
        cfg = BridgeConfig(omega2=7.0, omega3=3.0, j1=0, j2=0, j3=0, jx=0,
                           kappa1=1.0, kappa4=1.0)
        model = build_drift(cfg)
        mean = evolve_mean(model, np.array([0, 2.5, 0, 0], dtype=complex), 1.3)
        assert mean[1] == pytest.approx(2.5 * np.exp(-1j * 7.0 * 1.3), rel=1e-12)

    def test_semigroup_property(self, fig3):
        model = build_drift(replace(fig3, jx=13.7))
        mean0 = np.array([0.3, 1.0 - 0.2j, 0.1j, 0.0])
        once = evolve_mean(model, mean0, 0.9)
        twice = evolve_mean(model, evolve_mean(model, mean0, 0.5), 0.4)
        assert np.max(np.abs(once - twice)) < 1e-10 * np.max(np.abs(once))

    def test_rejects_bad_inputs(self, fig3):
        model = build_drift(fig3)
        mean0 = np.zeros(4, dtype=complex)
        with pytest.raises(ValueError):
            evolve_mean(model, mean0, -0.1)
        with pytest.raises(ValueError):
            evolve_mean(model, np.array([np.nan, 0, 0, 0], dtype=complex), 1.0)

    def test_balanced_longtime_magnitudes(self, fig3, fig3_tau):
        # bright transients die at the hybridized rate ~ kappa/2, so the
        # dark-projection values need ~40 tau here rather than 10 tau
        model = build_drift(fig3)
        mean0 = np.array([0, ALPHA_REF, 0, 0], dtype=complex)
        mean = evolve_mean(model, mean0, 40 * fig3_tau)
        assert abs(mean[1]) == pytest.approx(ALPHA_REF * 225.0 / 325.0, rel=0.02)
        assert abs(mean[2]) / abs(mean[1]) == pytest.approx(10.0 / 15.0, rel=0.01)


class TestEvolveCovariance:
    def test_rotation_preserves_identity(self):
        # pure oscillators, no diffusion: symplectic rotations fix the vacuum
        m = np.diag([-1j * 3.0, -1j * 5.0])
        model = DriftModel(m_complex=m, m_quad=quadrature_drift(m),
                           diffusion=np.zeros((4, 4)))
        cov = evolve_covariance(model, np.eye(4), 2.34)
        assert np.max(np.abs(cov - np.eye(4))) < 1e-12

    def test_single_lossy_mode_thermal(self):
        cfg = BridgeConfig(omega2=50, omega3=50, j1=0, j2=0, j3=0, jx=0,
                           kappa1=4.0, kappa4=4.0, n4=2.0)
        model = build_drift(cfg)
        cov = evolve_covariance(model, np.eye(8), 8.0)
        block = cov[np.ix_([3, 7], [3, 7])]
        assert np.max(np.abs(block - 5.0 * np.eye(2))) < 1e-9

    def test_symmetry_guaranteed(self, fig3):
        cfg = replace(fig3, n1=1.0, n4=0.3)
        cov = evolve_covariance(build_drift(cfg), np.eye(8), 0.7)
        assert np.array_equal(cov, cov.T)

    def test_long_horizon_stable(self, adiabatic_thermal):
        # eigendecomposition route must not overflow at hundreds of tau
        model = build_drift(adiabatic_thermal)
        cov = evolve_covariance(model, np.eye(8), 500.0)
        assert np.all(np.isfinite(cov))
        assert uncertainty_min_eig(cov) > -1e-9

    def test_uncertainty_preserved_along_trajectory(self, fig3):
        cfg = replace(fig3, n1=1.0, n4=1.0)
        model = build_drift(cfg)
        for t in np.linspace(0.01, 1.0, 12):
            cov = evolve_covariance(model, np.eye(8), float(t))
            assert uncertainty_min_eig(cov) > -1e-9


class TestOracleSignal:
    def test_vacuum_stays_centered(self, fig3):
        a2, a3, _ = oracle_signal(fig3, 0.0, 0.5)
        assert a2 == 0.0
        assert a3 == 0.0

    def test_negative_time_rejected(self, fig3):
        with pytest.raises(ValueError):
            oracle_signal(fig3, 1.0, -1.0)

    def test_balanced_covariance_block_identity(self, fig3, fig3_tau):
        # T = 0 and no local losses: vacuum is exactly stationary
        _, _, block = oracle_signal(fig3, ALPHA_REF, 10 * fig3_tau)
        assert np.max(np.abs(block - np.eye(4))) < 1e-6

    def test_unbalanced_signal_decays(self, fig3, fig3_tau):
        # the off-balance quasi-dark mode decays at |Re E| ~ 0.16 for jx = 12,
        # so the 1e-3 crossing sits near 1700 tau, far beyond the bright
        # relaxation; at 20 tau the signal is still ~0.6 alpha
        off = replace(fig3, jx=12.0)
        a2_early, _, _ = oracle_signal(off, ALPHA_REF, 20 * fig3_tau)
        assert abs(a2_early) > 0.5 * ALPHA_REF
        a2_late, _, _ = oracle_signal(off, ALPHA_REF, 1800 * fig3_tau)
        assert abs(a2_late) < 1e-3 * ALPHA_REF

    def test_eigenvalue_structure(self, fig3):
        # at balance exactly one marginal eigenvalue (the dark mode);
        # off balance every eigenvalue strictly decays
        ev_bal = np.linalg.eigvals(build_drift(fig3).m_complex)
        marginal = np.sum(np.abs(ev_bal.real) < 1e-9)
        assert marginal == 1
        assert np.sum(ev_bal.real < -1e-9) == 3
        ev_off = np.linalg.eigvals(build_drift(replace(fig3, jx=12.0)).m_complex)
        assert np.all(ev_off.real < -1e-3)

    def test_moments_physical(self, fig3):
        moments = oracle_moments(replace(fig3, n1=0.7, n4=1.3), 10.0, 0.4)
        moments.check_physical(tol=1e-9)

    def test_reduced_model_agreement_in_regime(self, adiabatic_thermal):
        # strong-damping regime: reduced first moments track the oracle to
        # well under the 5 % contract over [tau, 10 tau]
        from qwbridge.reduction import reduced_drift
        from scipy.linalg import expm

        cfg = adiabatic_thermal
        tau = relaxation_time(cfg)
        m2 = reduced_drift(cfg)
        alpha = 100.0
        for mult in (1.0, 3.0, 10.0):
            t = mult * tau
            a2_full, a3_full, _ = oracle_signal(cfg, alpha, t)
            reduced = expm(m2 * t) @ np.array([alpha, 0.0], dtype=complex)
            assert abs(a2_full) == pytest.approx(abs(reduced[0]), rel=0.05)
            assert abs(a3_full) == pytest.approx(abs(reduced[1]), rel=0.05)
