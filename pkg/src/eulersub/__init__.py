"""Explicit Euler subsolutions from solenoidal periodic data, and their numerical certification."""

from .eigen import lambda_max
from .energy import (
    EnergyProfile,
    PointState,
    energy_profile,
    equality_stress,
    generalized_energy,
    kinetic_energy,
    pointwise_energy_bound,
)
from .fields_io import GeneratorSpec, generate, load_field, save_field
from .spectral import (
    FourierTensorField,
    FourierVectorField,
    SpectralGrid,
    forward_transform,
    inverse_transform,
    l2_norm_sq,
    leray_project,
    riesz_apply,
)
from .subsolution import (
    SubsolutionSnapshot,
    evolve_fractional_heat,
    limit_data,
    make_snapshot,
    stress_from_velocity,
    time_derivative,
)
from .verifier import VerificationReport, VerifyConfig, full_report

__version__ = "0.1.0"

__all__ = [
    "EnergyProfile",
    "FourierTensorField",
    "FourierVectorField",
    "GeneratorSpec",
    "PointState",
    "SpectralGrid",
    "SubsolutionSnapshot",
    "VerificationReport",
    "VerifyConfig",
    "energy_profile",
    "equality_stress",
    "evolve_fractional_heat",
    "forward_transform",
    "full_report",
    "generalized_energy",
    "generate",
    "inverse_transform",
    "kinetic_energy",
    "l2_norm_sq",
    "lambda_max",
    "leray_project",
    "limit_data",
    "load_field",
    "make_snapshot",
    "pointwise_energy_bound",
    "riesz_apply",
    "save_field",
    "stress_from_velocity",
    "time_derivative",
]
