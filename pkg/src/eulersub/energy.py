"""Generalized energy e(v, u) = (d/2) lambda_max(v (x) v - u) and related quantities."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .eigen import lambda_max
from .spectral import FourierVectorField, SpectralGrid, integrate, l2_norm_sq, to_physical
from .subsolution import SubsolutionSnapshot

POINT_RTOL = 1e-14


def generalized_energy(v, u, method: str = "auto"):
    """(d/2) * lambda_max(v (x) v - u), batched over leading axes.

    ``v`` has shape ``(..., d)`` and ``u`` shape ``(..., d, d)``. ``u`` is
    assumed trace-free; only symmetry is enforced.
    """
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    d = v.shape[-1]
    if u.shape[-2:] != (d, d):
        raise ValueError(f"stress shape {u.shape} does not match velocity shape {v.shape}")
    m = v[..., :, None] * v[..., None, :] - u
    return 0.5 * d * lambda_max(m, method)


def equality_stress(v) -> np.ndarray:
    """v (x) v - |v|^2/d I, the unique u with e(v, u) = |v|^2/2."""
    v = np.asarray(v, dtype=float)
    d = v.shape[-1]
    outer = v[..., :, None] * v[..., None, :]
    return outer - (np.sum(v * v, axis=-1) / d)[..., None, None] * np.eye(d)


def pointwise_energy_bound(v, u):
    """(d/2)(|v|^2 + |u|_F), an upper bound for e(v, u)."""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    d = v.shape[-1]
    return 0.5 * d * (np.sum(v * v, axis=-1) + np.sqrt(np.sum(u * u, axis=(-2, -1))))


def scaled_energy(w, u):
    """phi(w, u) = e(w/sqrt|w|, u), with phi(0, u) = e(0, u).

    Since e(v, u) = phi(|v| v, u), Lipschitz bounds for phi turn L^2
    closeness of velocities into L^1 closeness of energies.
    """
    w = np.asarray(w, dtype=float)
    norm = np.sqrt(np.sqrt(np.sum(w * w, axis=-1, keepdims=True)))
    v = np.divide(w, norm, out=np.zeros_like(w), where=norm > 0)
    return generalized_energy(v, u)


def kinetic_energy(field: FourierVectorField) -> float:
    """E = (1/2) integral |v|^2."""
    return 0.5 * l2_norm_sq(field)


@dataclass(frozen=True)
class PointState:
    """A velocity value and a symmetric trace-free stress value at one point."""

    v: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        u = np.asarray(self.u, dtype=float)
        d = v.shape[0]
        if v.shape != (d,) or u.shape != (d, d):
            raise ValueError(f"incompatible shapes v{v.shape}, u{u.shape}")
        norm = float(np.sqrt(np.sum(u * u)))
        if np.max(np.abs(u - u.T)) > POINT_RTOL * max(norm, 1.0):
            raise ValueError("stress is not symmetric")
        if abs(np.trace(u)) > POINT_RTOL * max(norm, 1.0):
            raise ValueError(f"stress is not trace-free (trace {np.trace(u):.3e})")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "u", u)

    @property
    def energy(self) -> float:
        return float(generalized_energy(self.v, self.u))

    @property
    def energy_bound(self) -> float:
        return float(pointwise_energy_bound(self.v, self.u))


def random_states(rng: np.random.Generator, d: int, count: int, scale: float = 1.0):
    """Gaussian velocities and Gaussian symmetric trace-free stresses."""
    v = scale * rng.standard_normal((count, d))
    a = scale * rng.standard_normal((count, d, d))
    u = 0.5 * (a + np.swapaxes(a, 1, 2))
    u -= (np.trace(u, axis1=1, axis2=2) / d)[:, None, None] * np.eye(d)
    return v, u


@lru_cache(maxsize=None)
def estimate_lipschitz(d: int, samples: int = 10**6, seed: int = 0, inflate: float = 1.5) -> float:
    """Empirical Lipschitz constant of phi w.r.t. |dw| + |du|_F, inflated by ``inflate``.

    Half of the pairs are independent draws, half are close pairs (relative
    offset 1e-3) that probe the local slope, including near w = 0.
    """
    rng = np.random.default_rng(seed)
    best = 0.0
    chunk = 100_000
    done = 0
    while done < samples:
        count = min(chunk, samples - done)
        w1, u1 = random_states(rng, d, count)
        w1 *= rng.exponential(1.0, (count, 1)) ** 2
        w2, u2 = random_states(rng, d, count)
        close = rng.random(count) < 0.5
        w2 = np.where(close[:, None], w1 + 1e-3 * w2, w2)
        u2 = np.where(close[:, None, None], u1 + 1e-3 * u2, u2)
        dist = np.sqrt(np.sum((w1 - w2) ** 2, axis=1)) + np.sqrt(np.sum((u1 - u2) ** 2, axis=(1, 2)))
        quot = np.abs(scaled_energy(w1, u1) - scaled_energy(w2, u2)) / dist
        best = max(best, float(np.max(quot)))
        done += count
    return inflate * best


def _pointwise(values: np.ndarray, rank: int) -> np.ndarray:
    """Move leading component axes to the back: (d, [d,] *grid) -> (*grid, d[, d])."""
    return np.moveaxis(values, tuple(range(rank)), tuple(range(-rank, 0)))


def energy_density(v_coeffs: np.ndarray, u_coeffs: np.ndarray, grid: SpectralGrid, oversample: int = 2):
    """Samples of e(v(x), u(x)) on the refined grid, plus that grid."""
    v, fine = to_physical(v_coeffs, grid, oversample)
    u, _ = to_physical(u_coeffs, grid, oversample)
    return generalized_energy(_pointwise(v, 1), _pointwise(u, 2)), fine


def bump(t: float) -> float:
    return min(t, 1.0 / t) if t > 0 else 0.0


@dataclass(frozen=True)
class EnergyProfile:
    """ebar(x, t) = e(vbar, ubar)(x, t) + min(t, 1/t) sampled on ``grid``."""

    t: float
    base: np.ndarray
    bump: float
    grid: SpectralGrid

    @property
    def total(self) -> np.ndarray:
        return self.base + self.bump

    def integral(self) -> float:
        return integrate(self.total, self.grid)

    def base_integral(self) -> float:
        return integrate(self.base, self.grid)


def energy_profile(snapshot: SubsolutionSnapshot, oversample: int = 2) -> EnergyProfile:
    if oversample < 1:
        raise ValueError(f"oversample must be >= 1, got {oversample}")
    base, fine = energy_density(snapshot.vbar.coeffs, snapshot.ubar.coeffs, snapshot.grid, oversample)
    return EnergyProfile(t=snapshot.t, base=base, bump=bump(snapshot.t), grid=fine)
