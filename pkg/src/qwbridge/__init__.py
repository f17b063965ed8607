"""Simulation and estimation toolkit for a four-mode bosonic Wheatstone bridge."""

__version__ = "0.1.0"

from .errors import (
    BridgeConfigError,
    InconclusiveSweepError,
    NoBalanceError,
    NotBalancedError,
    OutOfRegimeError,
)
from .network import (
    BridgeConfig,
    DriftModel,
    NoiseChannel,
    NoiseSpec,
    balance_coupling,
    build_drift,
    effective_coupling,
    noise_spec,
    read_config_file,
    required_j0,
    thermal_occupation,
    write_config_file,
)
from .dynamics import (
    GaussianMoments,
    evolve_covariance,
    evolve_mean,
    oracle_moments,
    oracle_signal,
    relaxation_time,
    symplectic_form,
    uncertainty_min_eig,
)
from .reduction import (
    BalancedEigenvalues,
    EnvelopeExpansion,
    ReducedModel,
    adiabatic_reduce,
    balanced_eigenvalues,
    envelope_coefficients,
    envelope_expansion,
    longtime_mean,
)
from .balance import (
    DarkBrightModes,
    JxEstimate,
    balanced_reference_magnitude,
    check_dark_invariance,
    dark_bright_decompose,
    detect_balance,
    estimate_jx,
)
from .metrology import (
    FluctuationParams,
    PrecisionReport,
    crb_bound,
    gaussian_qfi,
    homodyne_precision,
    mu_coefficient,
    optimal_homodyne_phase,
    optimal_homodyne_precision,
    optimality_gap,
    precision_report,
    quantum_fluctuations,
)

__all__ = [
    "__version__",
    "BridgeConfig",
    "DriftModel",
    "NoiseChannel",
    "NoiseSpec",
    "GaussianMoments",
    "ReducedModel",
    "BalancedEigenvalues",
    "EnvelopeExpansion",
    "DarkBrightModes",
    "JxEstimate",
    "FluctuationParams",
    "PrecisionReport",
    "BridgeConfigError",
    "NoBalanceError",
    "NotBalancedError",
    "OutOfRegimeError",
    "InconclusiveSweepError",
    "thermal_occupation",
    "balance_coupling",
    "required_j0",
    "effective_coupling",
    "noise_spec",
    "build_drift",
    "read_config_file",
    "write_config_file",
    "symplectic_form",
    "uncertainty_min_eig",
    "relaxation_time",
    "evolve_mean",
    "evolve_covariance",
    "oracle_moments",
    "oracle_signal",
    "adiabatic_reduce",
    "balanced_eigenvalues",
    "longtime_mean",
    "envelope_coefficients",
    "envelope_expansion",
    "dark_bright_decompose",
    "check_dark_invariance",
    "detect_balance",
    "balanced_reference_magnitude",
    "estimate_jx",
    "quantum_fluctuations",
    "mu_coefficient",
    "optimality_gap",
    "optimal_homodyne_phase",
    "homodyne_precision",
    "optimal_homodyne_precision",
    "gaussian_qfi",
    "crb_bound",
    "precision_report",
]
