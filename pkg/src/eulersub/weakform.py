"""Residual of the weak (distributional) form of incompressible Euler.

For a divergence-free test field phi the weak form reads

    int_0^T int_Q (v . d_t phi + v (x) v : grad phi) dx dt + int_Q v0 . phi(., 0) dx = 0.

Test fields are single Fourier modes ``phi(x, t) = w(t) a sin(k.x + theta)``
with ``k.a = 0``; ``d_t phi`` and ``grad phi`` are evaluated analytically.
Time integrals use composite Simpson, space integrals the trapezoidal rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spectral import FourierVectorField, SpectralGrid, integrate, to_physical
from .subsolution import evolve_fractional_heat

Candidate = Callable[[float], np.ndarray]

WINDOWS = ("initial", "centered")


@dataclass(frozen=True)
class TestFunction:
    """phi(x, t) = w(t) * a * sin(k.x + phase), supported in t < horizon.

    ``initial``: w = (1 - (t/T)^2)^3, equal to 1 at t = 0 so the initial
    data term is exercised. ``centered``: w = (1 - (2t/T - 1)^2)^3, which
    vanishes at both ends. Both are C^2 at t = T.
    """

    __test__ = False  # not a pytest class

    k: tuple[int, ...]
    a: tuple[float, ...]
    horizon: float = 1.0
    phase: float = 0.0
    window: str = "initial"

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        a = np.asarray(self.a, dtype=float)
        if k.shape != a.shape or k.ndim != 1:
            raise ValueError(f"mode {self.k} and polarization {self.a} must be vectors of equal length")
        if any(int(ki) != ki for ki in self.k):
            raise ValueError(f"mode must be integer, got {self.k}")
        if abs(k @ a) > 1e-14 * np.linalg.norm(k) * np.linalg.norm(a):
            raise ValueError(f"test field is not divergence-free: k.a = {k @ a} for k={self.k}, a={self.a}")
        if self.horizon <= 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if self.window not in WINDOWS:
            raise ValueError(f"window must be one of {WINDOWS}, got {self.window!r}")
        object.__setattr__(self, "k", tuple(int(ki) for ki in self.k))
        object.__setattr__(self, "a", tuple(float(ai) for ai in self.a))

    def _s(self, t):
        t = np.asarray(t, dtype=float)
        if self.window == "initial":
            return t / self.horizon, 1.0 / self.horizon
        return 2.0 * t / self.horizon - 1.0, 2.0 / self.horizon

    def w(self, t):
        s, _ = self._s(t)
        return np.where(np.abs(s) < 1.0, (1.0 - s**2) ** 3, 0.0)

    def dw(self, t):
        s, ds = self._s(t)
        return np.where(np.abs(s) < 1.0, -6.0 * s * (1.0 - s**2) ** 2 * ds, 0.0)

    def phase_field(self, grid: SpectralGrid) -> np.ndarray:
        return np.tensordot(np.asarray(self.k, dtype=float), grid.points, axes=1) + self.phase


def simpson_weights(steps: int, horizon: float) -> tuple[np.ndarray, np.ndarray]:
    if steps < 2 or steps % 2:
        raise ValueError(f"Simpson's rule needs an even number of steps >= 2, got {steps}")
    t = np.linspace(0.0, horizon, steps + 1)
    w = np.ones(steps + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return t, w * (horizon / steps / 3.0)


def sample_on(field: FourierVectorField, grid: SpectralGrid) -> np.ndarray:
    """Physical samples of ``field`` on a grid that refines the field's own grid."""
    if grid.d != field.grid.d or grid.n % field.grid.n:
        raise ValueError(f"{grid} is not a refinement of {field.grid}")
    return to_physical(field.coeffs, field.grid, grid.n // field.grid.n)[0]


def weak_form_residual(
    candidate: Candidate,
    v0: FourierVectorField,
    phi: TestFunction,
    steps: int,
    grid: SpectralGrid,
) -> float:
    """Quadrature value of the weak-form left-hand side for ``candidate``.

    Args:
        candidate: maps t to velocity samples of shape ``(d, *grid.shape)``.
        v0: initial data.
        phi: divergence-free test field.
        steps: number of Simpson subintervals on [0, phi.horizon].
        grid: physical grid the candidate samples live on.
    """
    if len(phi.k) != grid.d:
        raise ValueError(f"test mode has length {len(phi.k)}, grid dimension is {grid.d}")
    theta = phi.phase_field(grid)
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    a = np.asarray(phi.a)
    k = np.asarray(phi.k, dtype=float)

    times, weights = simpson_weights(steps, phi.horizon)
    total = 0.0
    for t, wt in zip(times, weights):
        v = candidate(float(t))
        va = np.tensordot(a, v, axes=1)
        vk = np.tensordot(k, v, axes=1)
        linear = float(phi.dw(t)) * integrate(va * sin_t, grid)
        nonlinear = float(phi.w(t)) * integrate(va * vk * cos_t, grid)
        total += wt * (linear + nonlinear)
    initial = float(phi.w(0.0)) * integrate(np.tensordot(a, sample_on(v0, grid), axes=1) * sin_t, grid)
    return total + initial


def steady_shear(grid: SpectralGrid, amplitude: float = 1.0) -> Candidate:
    """v(x, t) = (A sin x_2, 0, ..., 0), a stationary Euler solution."""
    profile = np.zeros((grid.d,) + grid.shape)
    profile[0] = amplitude * np.sin(grid.points[1])
    profile.setflags(write=False)
    return lambda t: profile


def zero_candidate(grid: SpectralGrid) -> Candidate:
    zeros = np.zeros((grid.d,) + grid.shape)
    zeros.setflags(write=False)
    return lambda t: zeros


def subsolution_candidate(v0: FourierVectorField, grid: SpectralGrid) -> Candidate:
    """The subsolution velocity vbar(t), which is not itself a weak solution."""
    return lambda t: sample_on(evolve_fractional_heat(v0, t), grid)


@dataclass(frozen=True)
class RefinementLevel:
    steps: int
    residual: float
    order: float | None


def refinement_study(candidate, v0, phi, grid, steps_seq=(8, 16, 32, 64, 128, 256)) -> list[RefinementLevel]:
    """Residuals under time-step doubling with observed order log2(|r_{h}| / |r_{h/2}|)."""
    levels: list[RefinementLevel] = []
    prev = None
    for steps in steps_seq:
        r = weak_form_residual(candidate, v0, phi, steps, grid)
        order = None
        if prev is not None and prev != 0.0 and r != 0.0:
            order = math.log2(abs(prev) / abs(r)) / math.log2(steps / levels[-1].steps)
        levels.append(RefinementLevel(steps, r, order))
        prev = r
    return levels


def observed_order(levels: list[RefinementLevel], floor: float) -> float | None:
    """Smallest order among refinements whose residuals stay above ``floor``.

    Levels at or below the floor are dominated by rounding and carry no
    information about the scheme's order.
    """
    orders = [
        lvl.order
        for prev, lvl in zip(levels, levels[1:])
        if lvl.order is not None and abs(prev.residual) > floor and abs(lvl.residual) > floor
    ]
    return min(orders) if orders else None
