"""
Physical description of the four-mode bosonic bridge.

The bridge consists of cavity modes 1..4 with beam-splitter couplings
arranged in a Wheatstone pattern: modes 1 and 4 form the "read-out" arms
and are damped by Markovian thermal baths (rates kappa1, kappa4), while
modes 2 and 3 carry the probe amplitude.  The coupling jx between modes
3 and 4 is the unknown to be estimated; j1, j2, j3, j0 are known and
tunable.  Everything is expressed in dimensionless units (hbar = kB = 1),
so frequencies, rates, couplings and temperatures share one unit.

Conventions fixed here and used throughout the package:

* quadratures q = a + a^dag, p = -i(a - a^dag), ordered (q1..qn, p1..pn);
* vacuum covariance = identity, isolated thermal steady covariance
  = (2N + 1) * identity;
* amplitude damping at rate kappa means a drift diagonal -i*omega - kappa
  with input noise sqrt(2*kappa) a_in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .errors import BridgeConfigError, NoBalanceError

__all__ = [
    "BridgeConfig",
    "DriftModel",
    "NoiseChannel",
    "NoiseSpec",
    "thermal_occupation",
    "balance_coupling",
    "required_j0",
    "effective_coupling",
    "noise_spec",
    "build_drift",
    "read_config_file",
    "write_config_file",
]

#: Relative tolerance used to decide whether two couplings are "equal"
#: (branch selection between the degenerate and non-degenerate formulas).
COUPLING_EQ_RTOL = 1e-12


def thermal_occupation(omega: float, t: float) -> float:
    """Mean thermal boson number 1/(exp(omega/t) - 1) of a bath mode.

    Returns exactly 0 for t = 0.  Raises for non-positive frequency, where
    the Bose distribution is undefined.
    """
    if not omega > 0.0:
        raise BridgeConfigError(f"thermal occupation needs omega > 0, got {omega}")
    if t < 0.0:
        raise BridgeConfigError(f"temperature must be >= 0, got {t}")
    if t == 0.0:
        return 0.0
    return 1.0 / math.expm1(omega / t)


def balance_coupling(j1: float, j2: float, j3: float) -> float:
    """Coupling jx = j2*j3/j1 at which the bridge balances."""
    if j1 == 0.0:
        raise ZeroDivisionError("balance coupling undefined for j1 = 0")
    return j2 * j3 / j1


def required_j0(omega2: float, omega3: float, j1: float, j2: float) -> float | None:
    """Mode-2/3 coupling j0 required for a dark mode to exist.

    For j1 != j2 the dark mode exists only for
    j0 = (omega3 - omega2) * j1 * j2 / (j2**2 - j1**2), which is returned.
    For j1 == j2 the constraint degenerates: omega2 must equal omega3 and
    j0 is unconstrained, signalled by ``None``.
    """
    if _couplings_equal(j1, j2):
        if omega2 != omega3:
            raise NoBalanceError(
                "j1 = j2 requires omega2 = omega3 for a dark mode "
                f"(got omega2={omega2}, omega3={omega3})"
            )
        return None
    return (omega3 - omega2) * j1 * j2 / (j2**2 - j1**2)


def effective_coupling(g: float, beta: float) -> float:
    """Linearized coupling J = g*beta of a pump-enhanced radiation-pressure link.

    ``g`` is the bare single-quantum coupling and ``beta`` the classical
    amplitude of the driven mode.
    """
    return g * beta


def _couplings_equal(j1: float, j2: float) -> bool:
    return abs(j1 - j2) <= COUPLING_EQ_RTOL * max(abs(j1), abs(j2))


@dataclass(frozen=True)
class BridgeConfig:
    """All physical parameters of the four-mode bridge.

    ``omega1``/``omega4`` default to ``omega2``/``omega3`` when omitted;
    the reduced description does not depend on them, and equal frequencies
    minimize the detunings the adiabatic treatment assumes small.

    Bath occupations may be given directly (``n1``, ``n4``); otherwise they
    are derived from the temperatures via :func:`thermal_occupation`.
    Explicit occupations win when both are present.
    """

    omega2: float
    omega3: float
    j1: float
    j2: float
    j3: float
    jx: float
    j0: float = 0.0
    kappa1: float = 1.0
    kappa4: float = 1.0
    omega1: float | None = None
    omega4: float | None = None
    t1: float = 0.0
    t4: float = 0.0
    n1: float | None = None
    n4: float | None = None
    kappa2: float = 0.0
    kappa3: float = 0.0
    gamma2: float = 0.0
    gamma3: float = 0.0

    def __post_init__(self) -> None:
        if self.omega1 is None:
            object.__setattr__(self, "omega1", self.omega2)
        if self.omega4 is None:
            object.__setattr__(self, "omega4", self.omega3)
        for name in ("omega1", "omega2", "omega3", "omega4",
                     "j1", "j2", "j3", "jx", "j0",
                     "kappa1", "kappa4", "t1", "t4",
                     "kappa2", "kappa3", "gamma2", "gamma3"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise BridgeConfigError(f"{name} must be finite, got {value}")
        if not self.kappa1 > 0.0 or not self.kappa4 > 0.0:
            raise BridgeConfigError(
                f"bath rates must be positive (kappa1={self.kappa1}, kappa4={self.kappa4})"
            )
        if self.t1 < 0.0 or self.t4 < 0.0:
            raise BridgeConfigError("temperatures must be >= 0")
        for name in ("kappa2", "kappa3", "gamma2", "gamma3"):
            if getattr(self, name) < 0.0:
                raise BridgeConfigError(f"{name} must be >= 0")
        for name in ("n1", "n4"):
            value = getattr(self, name)
            if value is not None and (not math.isfinite(value) or value < 0.0):
                raise BridgeConfigError(f"{name} must be a finite occupation >= 0")

    @property
    def omegas(self) -> tuple[float, float, float, float]:
        return (self.omega1, self.omega2, self.omega3, self.omega4)  # type: ignore[return-value]

    @property
    def occupations(self) -> tuple[float, float]:
        """Bath occupations (N1, N4); explicit values override temperatures."""
        n1 = self.n1 if self.n1 is not None else (
            thermal_occupation(self.omega1, self.t1) if self.t1 > 0.0 else 0.0
        )
        n4 = self.n4 if self.n4 is not None else (
            thermal_occupation(self.omega4, self.t4) if self.t4 > 0.0 else 0.0
        )
        return (n1, n4)

    @property
    def symmetric_arms(self) -> bool:
        """True when j1 = j2 (degenerate branch of the balance condition)."""
        return _couplings_equal(self.j1, self.j2)

    @property
    def balance_jx(self) -> float:
        return balance_coupling(self.j1, self.j2, self.j3)

    def is_balanced(self, rtol: float = 1e-9) -> bool:
        """Whether jx sits at the balance point and the dark-mode constraint holds."""
        if self.j1 == 0.0:
            return False
        scale = max(abs(self.jx), abs(self.balance_jx), 1e-30)
        if abs(self.jx - self.balance_jx) > rtol * scale:
            return False
        lhs = self.omega3 - self.omega2
        if self.symmetric_arms:
            return abs(lhs) <= rtol * max(abs(self.omega2), abs(self.omega3), 1.0)
        rhs = self.j0 * (self.j2 / self.j1 - self.j1 / self.j2)
        return abs(lhs - rhs) <= rtol * max(abs(lhs), abs(rhs), 1.0)

    @property
    def gain_compensated(self) -> bool:
        """True when every intrinsic loss of modes 2/3 is matched by equal gain."""
        return self.kappa2 == self.gamma2 and self.kappa3 == self.gamma3

    def balanced(self) -> "BridgeConfig":
        """Copy of this config with jx set to the balance value."""
        return replace(self, jx=self.balance_jx)


@dataclass(frozen=True)
class NoiseChannel:
    """One delta-correlated input: ``kind`` is 'loss' (couples an annihilation
    noise operator) or 'gain' (couples a creation operator, anti-normal
    correlator, occupation 0)."""

    mode: int
    rate: float
    occupation: float
    kind: str


@dataclass(frozen=True)
class NoiseSpec:
    n1: float
    n4: float
    channels: tuple[NoiseChannel, ...]


def noise_spec(config: BridgeConfig) -> NoiseSpec:
    """Enumerate all input-noise channels of the full four-mode model."""
    n1, n4 = config.occupations
    channels = [
        NoiseChannel(mode=0, rate=config.kappa1, occupation=n1, kind="loss"),
        NoiseChannel(mode=3, rate=config.kappa4, occupation=n4, kind="loss"),
    ]
    # intrinsic losses of modes 2/3 are zero-temperature; gains carry the
    # anti-normal vacuum correlator, hence occupation 0 as well
    if config.kappa2 > 0.0:
        channels.append(NoiseChannel(mode=1, rate=config.kappa2, occupation=0.0, kind="loss"))
    if config.gamma2 > 0.0:
        channels.append(NoiseChannel(mode=1, rate=config.gamma2, occupation=0.0, kind="gain"))
    if config.kappa3 > 0.0:
        channels.append(NoiseChannel(mode=2, rate=config.kappa3, occupation=0.0, kind="loss"))
    if config.gamma3 > 0.0:
        channels.append(NoiseChannel(mode=2, rate=config.gamma3, occupation=0.0, kind="gain"))
    return NoiseSpec(n1=n1, n4=n4, channels=tuple(channels))


@dataclass(frozen=True)
class DriftModel:
    """Linear model dA/dt = m_complex A + noise, together with its real
    quadrature representation and the matching diffusion matrix.

    ``m_quad`` acts on (q1..qn, p1..pn); for m_complex = MR + i*MI it is
    [[MR, -MI], [MI, MR]].  ``diffusion`` is defined so the symmetrized
    covariance obeys dC/dt = A C + C A^T + D.
    """

    m_complex: NDArray[np.complex128]
    m_quad: NDArray[np.float64]
    diffusion: NDArray[np.float64]

    @property
    def n_modes(self) -> int:
        return self.m_complex.shape[0]


def quadrature_drift(m_complex: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Real (q, p)-space representation of a complex mode-space drift."""
    mr, mi = m_complex.real, m_complex.imag
    return np.block([[mr, -mi], [mi, mr]])


def complex_drift(config: BridgeConfig) -> NDArray[np.complex128]:
    """The 4x4 complex drift matrix of the mode amplitudes."""
    w1, w2, w3, w4 = config.omegas
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = -1j * w1 - config.kappa1
    m[1, 1] = -1j * w2 - (config.kappa2 - config.gamma2)
    m[2, 2] = -1j * w3 - (config.kappa3 - config.gamma3)
    m[3, 3] = -1j * w4 - config.kappa4
    m[0, 1] = m[1, 0] = -1j * config.j1
    m[0, 2] = m[2, 0] = -1j * config.j2
    m[1, 3] = m[3, 1] = -1j * config.j3
    m[2, 3] = m[3, 2] = -1j * config.jx
    m[1, 2] = m[2, 1] = -1j * config.j0
    return m


def build_drift(config: BridgeConfig) -> DriftModel:
    """Assemble the full four-mode drift and diffusion matrices.

    Each independent channel on mode m adds 2*rate*(2N + 1) to the (q_m, q_m)
    and (p_m, p_m) diffusion entries; this normalization makes an isolated
    thermal mode relax to covariance (2N + 1) * identity.
    """
    m = complex_drift(config)
    spec = noise_spec(config)
    d = np.zeros((8, 8))
    for ch in spec.channels:
        w = 2.0 * ch.rate * (2.0 * ch.occupation + 1.0)
        d[ch.mode, ch.mode] += w
        d[4 + ch.mode, 4 + ch.mode] += w
    return DriftModel(m_complex=m, m_quad=quadrature_drift(m), diffusion=d)


# --- config file round-trip -------------------------------------------------

_CONFIG_KEYS = (
    "omega1", "omega2", "omega3", "omega4",
    "j1", "j2", "j3", "jx", "j0",
    "kappa1", "kappa4", "t1", "t4", "n1", "n4",
    "kappa2", "kappa3", "gamma2", "gamma3",
    "alpha",
)


def read_config_file(path: str | Path) -> tuple[BridgeConfig, float | None]:
    """Parse a flat ``key = value`` config file.

    Lines starting with '#' and blank lines are ignored; unknown keys are
    rejected.  Returns the configuration and the optional probe amplitude
    ``alpha`` carried alongside it.
    """
    values: dict[str, float] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise BridgeConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if key not in _CONFIG_KEYS:
            raise BridgeConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise BridgeConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(value.strip())
        except ValueError as exc:
            raise BridgeConfigError(f"{path}:{lineno}: bad number for {key!r}: {value.strip()!r}") from exc

    alpha = values.pop("alpha", None)
    required = ("omega2", "omega3", "j1", "j2", "j3", "jx", "kappa1", "kappa4")
    missing = [k for k in required if k not in values]
    if missing:
        raise BridgeConfigError(f"{path}: missing required keys: {', '.join(missing)}")
    return BridgeConfig(**values), alpha  # type: ignore[arg-type]


def write_config_file(path: str | Path, config: BridgeConfig, alpha: float | None = None) -> None:
    """Write a config file that round-trips bit-exactly through repr()."""
    lines = ["# bridge configuration (dimensionless units, hbar = kB = 1)"]
    for f in fields(config):
        value = getattr(config, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {value!r}")
    if alpha is not None:
        lines.append(f"alpha = {alpha!r}")
    Path(path).write_text("\n".join(lines) + "\n")
