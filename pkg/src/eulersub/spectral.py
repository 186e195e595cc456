"""Periodic vector and tensor fields on the torus Q = [0, 2*pi]^d.

Coefficients use the unit-Parseval normalization

    v(x) = (2*pi)^(-d/2) * sum_k vhat(k) * exp(i k.x)

so that ``sum_k |vhat(k)|^2`` equals the integral of ``|v|^2`` over Q with
no extra constant. Coefficient arrays are stored in numpy FFT order with
the component axes in front: ``(d, n, ..., n)`` for vectors and
``(d, d, n, ..., n)`` for tensors.

Nyquist modes (any component equal to n/2) are forced to zero on
construction, so every stored lattice is closed under k -> -k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

NORMALIZATION_TAG = "unit-parseval"
SOLENOIDAL_RTOL = 1e-14
HERMITIAN_RTOL = 1e-12


class HermitianSymmetryError(ValueError):
    """Raised when coefficients do not describe a real-valued field."""

    def __init__(self, k: tuple[int, ...], defect: float):
        self.k = k
        self.defect = defect
        super().__init__(
            f"Hermitian symmetry violated at wavenumber k={k} (relative defect {defect:.3e})"
        )


class NotSolenoidalError(ValueError):
    """Raised when a divergence-free field is required but k.vhat(k) != 0."""


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform grid on [0, 2*pi]^d with n points (and modes) per axis.

    The wavenumber lattice is the numpy FFT lattice; its Nyquist plane is
    identified with k_i = n/2 and carries no data.
    """

    d: int
    n: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"dimension must be an integer >= 2, got d={self.d}")
        if int(self.n) != self.n or self.n < 4 or self.n % 2:
            raise ValueError(f"modes per axis must be an even integer >= 4, got n={self.n}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def volume(self) -> float:
        """|Q| = (2*pi)^d."""
        return (2 * math.pi) ** self.d

    @property
    def cell_volume(self) -> float:
        return (2 * math.pi / self.n) ** self.d

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers, shape ``(d, n, ..., n)``."""
        k1 = np.fft.fftfreq(self.n, 1.0 / self.n).round().astype(np.int64)
        return np.stack(np.meshgrid(*([k1] * self.d), indexing="ij"))

    @cached_property
    def k_abs(self) -> np.ndarray:
        return np.sqrt(np.sum(self.wavenumbers.astype(float) ** 2, axis=0))

    @cached_property
    def k_unit(self) -> np.ndarray:
        """k/|k| with the k = 0 entry set to zero."""
        safe = np.where(self.k_abs > 0, self.k_abs, 1.0)
        return self.wavenumbers / safe

    @cached_property
    def nyquist(self) -> np.ndarray:
        return np.any(np.abs(self.wavenumbers) == self.n // 2, axis=0)

    @cached_property
    def points(self) -> np.ndarray:
        """Physical sample points x_j = 2*pi*j/n, shape ``(d, n, ..., n)``."""
        x1 = 2 * math.pi * np.arange(self.n) / self.n
        return np.stack(np.meshgrid(*([x1] * self.d), indexing="ij"))

    def refined(self, factor: int) -> SpectralGrid:
        if factor < 1:
            raise ValueError(f"refinement factor must be >= 1, got {factor}")
        return SpectralGrid(self.d, self.n * factor)

    def lattice_index(self) -> np.ndarray:
        """Per-axis array positions listing k = -n/2+1, ..., n/2 in increasing order."""
        return np.arange(-self.n // 2 + 1, self.n // 2 + 1) % self.n

    def wavenumber_at(self, index: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(int(self.wavenumbers[(i,) + tuple(index)]) for i in range(self.d))


def _spatial_axes(arr: np.ndarray, d: int) -> tuple[int, ...]:
    return tuple(range(arr.ndim - d, arr.ndim))


def negate_wavenumbers(coeffs: np.ndarray, d: int) -> np.ndarray:
    """Return ``c(-k)`` for an array in FFT order (last d axes spatial)."""
    axes = _spatial_axes(coeffs, d)
    return np.roll(np.flip(coeffs, axis=axes), 1, axis=axes)


def hermitian_part(coeffs: np.ndarray, d: int) -> np.ndarray:
    """Project coefficients onto the real-field subspace."""
    return 0.5 * (coeffs + np.conj(negate_wavenumbers(coeffs, d)))


def hermitian_defect(coeffs: np.ndarray, d: int) -> tuple[float, tuple[int, ...]]:
    """Largest relative |c(k) - conj c(-k)| and the array position where it occurs."""
    diff = np.abs(coeffs - np.conj(negate_wavenumbers(coeffs, d)))
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if scale == 0.0:
        return 0.0, (0,) * d
    spatial = diff.reshape((-1,) + coeffs.shape[-d:]).max(axis=0)
    pos = np.unravel_index(int(np.argmax(spatial)), spatial.shape)
    return float(spatial[pos] / scale), tuple(int(p) for p in pos)


class _SpectralField:
    """Shared behaviour of immutable coefficient containers."""

    rank: int = 1

    def __init__(self, grid: SpectralGrid, coeffs):
        coeffs = np.array(coeffs, dtype=np.complex128)
        expected = (grid.d,) * self.rank + grid.shape
        if coeffs.shape != expected:
            raise ValueError(
                f"coefficient array has shape {coeffs.shape}, expected {expected} for {grid}"
            )
        coeffs[..., grid.nyquist] = 0.0
        coeffs.setflags(write=False)
        self._grid = grid
        self._coeffs = coeffs

    @property
    def grid(self) -> SpectralGrid:
        return self._grid

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    def _like(self, coeffs):
        return type(self)(self._grid, coeffs)

    def __add__(self, other):
        self._check_same_grid(other)
        return self._like(self._coeffs + other._coeffs)

    def __sub__(self, other):
        self._check_same_grid(other)
        return self._like(self._coeffs - other._coeffs)

    def __mul__(self, scalar):
        return self._like(self._coeffs * scalar)

    __rmul__ = __mul__

    def _check_same_grid(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.grid != self.grid:
            raise ValueError(f"grid mismatch: {self.grid} vs {other.grid}")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._coeffs)))

    def is_hermitian(self, rtol: float = HERMITIAN_RTOL) -> bool:
        return hermitian_defect(self._coeffs, self._grid.d)[0] <= rtol

    def __repr__(self):
        return f"{type(self).__name__}(grid={self._grid}, max|c|={self.max_abs():.3e})"


class FourierVectorField(_SpectralField):
    """Coefficients k -> vhat(k) in C^d of a periodic vector field."""

    rank = 1

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> FourierVectorField:
        return cls(grid, np.zeros((grid.d,) + grid.shape, dtype=complex))

    def divergence_defect(self) -> float:
        """max_k |k.vhat(k)|/|k| relative to the largest coefficient, or mean if larger."""
        scale = self.max_abs()
        if scale == 0.0:
            return 0.0
        kdotv = np.abs(np.sum(self._grid.k_unit * self._coeffs, axis=0))
        mean = np.max(np.abs(self._coeffs[(slice(None),) + (0,) * self._grid.d]))
        return float(max(kdotv.max(), mean) / scale)

    @cached_property
    def solenoidal(self) -> bool:
        """True when k.vhat(k) = 0 for all k and vhat(0) = 0, at 1e-14 relative."""
        return self.divergence_defect() <= SOLENOIDAL_RTOL

    def require_solenoidal(self, what: str = "field"):
        defect = self.divergence_defect()
        if defect > SOLENOIDAL_RTOL:
            raise NotSolenoidalError(
                f"{what} is not solenoidal: relative divergence defect {defect:.3e}"
            )


class FourierTensorField(_SpectralField):
    """Coefficients k -> uhat(k) in C^{d x d} of a periodic matrix field."""

    rank = 2

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> FourierTensorField:
        return cls(grid, np.zeros((grid.d, grid.d) + grid.shape, dtype=complex))

    def trace(self) -> np.ndarray:
        return np.einsum("ii...->...", self._coeffs)

    def asymmetry(self) -> np.ndarray:
        return np.abs(self._coeffs - np.swapaxes(self._coeffs, 0, 1)).max(axis=(0, 1))


def forward_transform(samples, grid: SpectralGrid) -> FourierVectorField:
    """Fourier coefficients of real vector samples taken at ``grid.points``.

    Nyquist content is discarded, so the transform pair is an identity on
    samples whose spectrum avoids the Nyquist plane.
    """
    samples = np.asarray(samples, dtype=float)
    expected = (grid.d,) + grid.shape
    if samples.shape != expected:
        raise ValueError(f"samples have shape {samples.shape}, expected {expected}")
    factor = (2 * math.pi) ** (grid.d / 2) / grid.size
    coeffs = np.fft.fftn(samples, axes=_spatial_axes(samples, grid.d)) * factor
    return FourierVectorField(grid, coeffs)


def pad_spectrum(coeffs: np.ndarray, grid: SpectralGrid, factor: int) -> tuple[np.ndarray, SpectralGrid]:
    """Embed coefficients into the lattice of ``grid.refined(factor)`` (zero padding)."""
    fine = grid.refined(factor)
    if factor == 1:
        return coeffs, fine
    lead = coeffs.shape[: coeffs.ndim - grid.d]
    out = np.zeros(lead + fine.shape, dtype=complex)
    k1 = np.fft.fftfreq(grid.n, 1.0 / grid.n).round().astype(np.int64) % fine.n
    index = (Ellipsis,) + np.ix_(*([k1] * grid.d))
    out[index] = coeffs
    return out, fine


def to_physical(coeffs: np.ndarray, grid: SpectralGrid, oversample: int = 1) -> tuple[np.ndarray, SpectralGrid]:
    """Real samples of any-rank coefficients on the (optionally refined) grid."""
    defect, pos = hermitian_defect(coeffs, grid.d)
    if defect > HERMITIAN_RTOL:
        raise HermitianSymmetryError(grid.wavenumber_at(pos), defect)
    padded, fine = pad_spectrum(coeffs, grid, oversample)
    factor = fine.size / (2 * math.pi) ** (grid.d / 2)
    values = np.fft.ifftn(padded, axes=_spatial_axes(padded, grid.d)) * factor
    return values.real.copy(), fine


def inverse_transform(field: FourierVectorField | FourierTensorField, oversample: int = 1) -> np.ndarray:
    """Physical samples of a field; raises if the coefficients are not Hermitian."""
    return to_physical(field.coeffs, field.grid, oversample)[0]


def leray_project(field: FourierVectorField) -> FourierVectorField:
    """Orthogonal projection onto mean-zero divergence-free fields."""
    khat = field.grid.k_unit
    c = field.coeffs
    projected = c - khat * np.sum(khat * c, axis=0)
    projected[(slice(None),) + (0,) * field.grid.d] = 0.0
    return FourierVectorField(field.grid, projected)


def riesz_apply(j: int, fhat: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Riesz transform along axis ``j`` (0-based): multiply by i*k_j/|k|, zero at k=0."""
    if not 0 <= j < grid.d:
        raise ValueError(f"axis index must lie in [0, {grid.d}), got {j}")
    return 1j * grid.k_unit[j] * np.asarray(fhat)


def l2_norm_sq(field: FourierVectorField | FourierTensorField) -> float:
    """Integral of |v|^2 over Q, computed as the coefficient sum."""
    return float(np.sum(np.abs(field.coeffs) ** 2))


def integrate(values: np.ndarray, grid: SpectralGrid) -> float:
    """Trapezoidal rule on the uniform periodic grid (last d axes)."""
    return float(np.sum(values) * grid.cell_volume)
