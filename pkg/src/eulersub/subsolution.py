"""Explicit subsolution (vbar, ubar, qbar = 0) built from solenoidal data.

The velocity follows the half-Laplacian heat flow, each mode decaying as
exp(-|k| t); the stress is the symmetric Riesz combination
``ubar_ij = -R_j vbar_i - R_i vbar_j``. Everything is closed-form per mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import FourierTensorField, FourierVectorField, SpectralGrid

# exp(-x) underflows to zero in double precision beyond this exponent
UNDERFLOW_EXPONENT = 745.0


def heat_multiplier(grid: SpectralGrid, t: float) -> np.ndarray:
    """Per-mode factor exp(-|k| t), flushed to 0 once |k| t exceeds the underflow bound."""
    if t < 0:
        raise ValueError(f"the fractional heat semigroup is only defined for t >= 0, got t={t}")
    exponent = grid.k_abs * t
    return np.where(exponent > UNDERFLOW_EXPONENT, 0.0, np.exp(-np.minimum(exponent, UNDERFLOW_EXPONENT)))


def evolve_fractional_heat(v0: FourierVectorField, t: float) -> FourierVectorField:
    """Solve d_t v + (-Laplacian)^(1/2) v = 0 with v(0) = v0, exactly in Fourier space."""
    if t < 0:
        raise ValueError(f"the fractional heat semigroup is only defined for t >= 0, got t={t}")
    if t == 0:
        return v0
    return FourierVectorField(v0.grid, v0.coeffs * heat_multiplier(v0.grid, t))


def stress_from_velocity(vbar: FourierVectorField, *, check: bool = True) -> FourierTensorField:
    """uhat_ij(k) = -i (k_j/|k| vhat_i + k_i/|k| vhat_j), uhat(0) = 0.

    Symmetric by construction. The trace equals -2i k.vhat/|k|, so it is
    trace-free only for solenoidal input; with ``check=False`` a
    non-solenoidal field is accepted and its trace defect is left in place
    for the verifier to report.
    """
    if check:
        vbar.require_solenoidal("velocity")
    khat = vbar.grid.k_unit
    c = vbar.coeffs
    outer = khat[None, :] * c[:, None]
    return FourierTensorField(vbar.grid, -1j * (outer + np.swapaxes(outer, 0, 1)))


# the pressure of the construction vanishes identically
QBAR = 0.0


@dataclass(frozen=True)
class SubsolutionSnapshot:
    """The triple (vbar, ubar, qbar) at a fixed time t > 0."""

    t: float
    vbar: FourierVectorField
    ubar: FourierTensorField
    qbar: float = QBAR

    @property
    def grid(self) -> SpectralGrid:
        return self.vbar.grid


def make_snapshot(v0: FourierVectorField, t: float, *, check: bool = True) -> SubsolutionSnapshot:
    if t <= 0:
        raise ValueError(f"snapshots require t > 0 (use limit_data for t = 0), got t={t}")
    vbar = evolve_fractional_heat(v0, t)
    return SubsolutionSnapshot(t=float(t), vbar=vbar, ubar=stress_from_velocity(vbar, check=check))


def time_derivative(v0: FourierVectorField, t: float) -> FourierVectorField:
    """Analytic d_t vbar: -|k| exp(-|k| t) v0hat(k)."""
    if t <= 0:
        raise ValueError(f"time derivative is taken at t > 0, got t={t}")
    grid = v0.grid
    return FourierVectorField(grid, -grid.k_abs * heat_multiplier(grid, t) * v0.coeffs)


def limit_data(v0: FourierVectorField, *, check: bool = True) -> tuple[FourierVectorField, FourierTensorField]:
    """The t -> 0 limits (v0, u0) of the snapshot family."""
    return v0, stress_from_velocity(v0, check=check)
