"""Dark/bright decomposition, balance detection, and the estimation protocol."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwbridge import (
    BridgeConfig,
    InconclusiveSweepError,
    NoBalanceError,
    balanced_reference_magnitude,
    check_dark_invariance,
    dark_bright_decompose,
    detect_balance,
    estimate_jx,
    oracle_signal,
    relaxation_time,
)
from qwbridge.reduction import reduced_drift

from conftest import ALPHA_REF


class TestDarkBrightDecompose:
    def test_symmetric_lambdas(self):
        cfg = BridgeConfig(omega2=100, omega3=100, j1=10, j2=10, j3=10, jx=10,
                           j0=0.0, kappa1=10, kappa4=10)
        modes = dark_bright_decompose(cfg)
        assert modes.lambda_plus == pytest.approx(0.5, rel=1e-12)
        assert modes.lambda_minus == pytest.approx(0.5, rel=1e-12)
        assert modes.bright == (10.0, 10.0)
        assert modes.dark == (10.0, -10.0)

    def test_reference_lambda_difference(self, fig3):
        modes = dark_bright_decompose(fig3)
        assert modes.lambda_plus - modes.lambda_minus == pytest.approx(
            1.2 / 150.0, rel=1e-12
        )

    def test_detuned_equal_arms_rejected(self):
        cfg = BridgeConfig(omega2=100, omega3=100, j1=10, j2=15, j3=10, jx=15,
                           j0=1.0, kappa1=10, kappa4=10)
        with pytest.raises(NoBalanceError):
            dark_bright_decompose(cfg)

    @given(
        om2=st.floats(50, 150),
        j1=st.floats(1, 20),
        j2=st.floats(1, 20),
        j3=st.floats(1, 20),
        j0=st.floats(-5, 5),
    )
    @settings(max_examples=60)
    def test_lambda_equations_hold(self, om2, j1, j2, j3, j0):
        # well-separated arm couplings keep the linear solve conditioned
        if abs(j1**2 - j2**2) < 0.5:
            j2 = j1 + 1.0
        om3 = om2 + j0 * (j2 / j1 - j1 / j2)
        cfg = BridgeConfig(omega2=om2, omega3=om3, j1=j1, j2=j2, j3=j3,
                           jx=j2 * j3 / j1, j0=j0, kappa1=10, kappa4=10)
        modes = dark_bright_decompose(cfg)
        lp, lm = modes.lambda_plus, modes.lambda_minus
        scale = max(abs(om2), abs(om3), 1.0)
        assert abs(lp * j1**2 + lm * j2**2 - om2) < 1e-10 * scale
        assert abs(lp * j2**2 + lm * j1**2 - om3) < 1e-10 * scale
        assert abs((lp - lm) - j0 / (j1 * j2)) < 1e-10 * max(abs(j0 / (j1 * j2)), 1.0)
        # orthogonality of the unnormalized mode coefficients
        b, d = modes.bright, modes.dark
        assert b[0] * d[0] + b[1] * d[1] == 0.0

    def test_dark_matches_reduced_null_direction(self, fig3):
        modes = dark_bright_decompose(fig3)
        ev, vec = np.linalg.eig(reduced_drift(fig3))
        dark_vec = vec[:, int(np.argmin(np.abs(ev.real)))]
        target = np.array(modes.dark) / np.linalg.norm(modes.dark)
        assert abs(np.vdot(target, dark_vec)) == pytest.approx(1.0, abs=1e-9)


class TestDarkInvariance:
    def test_balanced_conserved(self, fig3, fig3_tau):
        assert check_dark_invariance(fig3, 10 * fig3_tau, alpha=ALPHA_REF) < 0.02

    def test_unbalanced_decays(self, fig3):
        # far beyond the slow off-balance decay time the dark projection is gone
        deviation = check_dark_invariance(replace(fig3, jx=12.0), 50.0, alpha=ALPHA_REF, num=33)
        assert deviation > 0.9

    def test_zero_amplitude_convention(self, fig3):
        assert check_dark_invariance(fig3, 1.0, alpha=0.0) == 0.0


class TestDetectBalance:
    def test_trivial_cases(self):
        assert detect_balance(50.0 + 0j, 100.0, epsilon=0.01)
        assert not detect_balance(0.0, 100.0, epsilon=0.01)
        with pytest.raises(ValueError):
            detect_balance(1.0, 0.0)

    def test_balanced_bridge_detected(self, fig3, fig3_tau):
        a2, _, _ = oracle_signal(fig3, ALPHA_REF, 10 * fig3_tau)
        ref = balanced_reference_magnitude(fig3, ALPHA_REF)
        assert detect_balance(a2, ref, epsilon=0.1)

    def test_unbalanced_bridge_rejected_at_long_horizon(self, fig3):
        # the jx = 12 signal needs ~40 time units (1600 tau) to decay below
        # the detection threshold; short horizons cannot separate the cases
        off = replace(fig3, jx=12.0)
        a2, _, _ = oracle_signal(off, ALPHA_REF, 45.0)
        ref = balanced_reference_magnitude(fig3, ALPHA_REF)
        assert not detect_balance(a2, ref, epsilon=0.1)

    def test_five_percent_detuning_rejected(self, fig3):
        # |jx - balance| = 5 %: slow decay rate ~ 0.01, so give it ~700 units
        off = replace(fig3, jx=15.75)
        ev = np.linalg.eigvals(reduced_drift(off))
        rate = -float(ev.real.max())
        horizon = 5.0 / rate
        a2, _, _ = oracle_signal(off, ALPHA_REF, horizon)
        ref = balanced_reference_magnitude(fig3, ALPHA_REF)
        assert not detect_balance(a2, ref, epsilon=0.1)


class TestEstimateJx:
    def test_reference_protocol(self, fig3):
        # hidden jx = 15, tuning j3 over [5, 15] in steps of 0.5; balance at
        # j3 = 10.  The profile contrast builds at the slow off-balance rate,
        # hence the long horizon.
        grid = [5.0 + 0.5 * k for k in range(21)]
        estimate = estimate_jx(fig3, grid, ALPHA_REF, t=20.0)
        assert estimate.jx_estimate == pytest.approx(15.0, abs=0.1)
        assert len(estimate.profile) == 21

    def test_symmetric_peak_on_grid(self):
        cfg = BridgeConfig(omega2=100, omega3=100, j1=10, j2=10, j3=8, jx=10,
                           j0=0.0, kappa1=10, kappa4=10)
        grid = [8.0 + 0.5 * k for k in range(9)]
        estimate = estimate_jx(cfg, grid, 100.0, t=200.0)
        # the parabolic vertex carries a small O(1/t) bias even with the peak
        # on-grid, since the projection coefficient tilts the profile
        assert estimate.jx_estimate == pytest.approx(10.0, abs=0.01)

    def test_boundary_maximum_inconclusive(self, fig3):
        grid = [11.0 + 0.5 * k for k in range(9)]  # misses balance at j3 = 10
        with pytest.raises(InconclusiveSweepError):
            estimate_jx(fig3, grid, ALPHA_REF, t=20.0)

    def test_amplitude_invariance(self, fig3):
        grid = [8.0 + 0.5 * k for k in range(9)]
        a = estimate_jx(fig3, grid, 10.0, t=20.0).jx_estimate
        b = estimate_jx(fig3, grid, 100.0, t=20.0).jx_estimate
        assert a == pytest.approx(b, abs=1e-9)

    def test_grid_validation(self, fig3):
        with pytest.raises(ValueError):
            estimate_jx(fig3, [1.0, 2.0], 1.0, 1.0)
        with pytest.raises(ValueError):
            estimate_jx(fig3, [3.0, 2.0, 1.0], 1.0, 1.0)
