"""Shared fixtures: the reference parameter sets used across the suite."""

from __future__ import annotations

import pytest

from qwbridge import BridgeConfig, relaxation_time

#: Probe amplitude used by the reference sweep.
ALPHA_REF = 1e4


@pytest.fixture()
def fig3() -> BridgeConfig:
    """Detuned reference bridge (j1 != j2), balanced at jx = 15."""
    return BridgeConfig(
        omega2=100.0, omega3=101.0,
        j1=10.0, j2=15.0, j3=10.0, jx=15.0, j0=1.2,
        kappa1=10.0, kappa4=10.0,
    )


@pytest.fixture()
def fig3_tau(fig3: BridgeConfig) -> float:
    return relaxation_time(fig3)


@pytest.fixture()
def symmetric() -> BridgeConfig:
    """Symmetric-arm bridge (j1 = j2), balanced at jx = j3."""
    return BridgeConfig(
        omega2=100.0, omega3=100.0,
        j1=10.0, j2=10.0, j3=10.0, jx=10.0, j0=0.0,
        kappa1=10.0, kappa4=10.0,
    )


@pytest.fixture()
def adiabatic_thermal() -> BridgeConfig:
    """Deep strong-damping regime with unit arm coupling and thermal baths.

    With j1 = 1 the published balanced-covariance pattern coincides with the
    microscopic one, so closed form, reduced model and oracle can all be
    compared at tight tolerance.
    """
    return BridgeConfig(
        omega2=100.0, omega3=100.0,
        j1=1.0, j2=1.5, j3=1.0, jx=1.5, j0=0.0,
        kappa1=100.0, kappa4=100.0,
        n1=1.0, n4=1.0,
    )
