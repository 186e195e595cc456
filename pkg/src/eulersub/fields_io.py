"""Initial-data generators and the binary field container.

Container layout (all little-endian)::

    offset  size  content
    0       4     magic b"ESUB"
    4       2     format version (uint16), currently 1
    6       1     dimension d (uint8)
    7       1     solenoidal flag (uint8, 0 or 1)
    8       4     modes per axis n (uint32)
    12      16    normalization tag, ASCII, NUL padded ("unit-parseval")
    28      8     RNG algorithm identifier, ASCII, NUL padded ("PCG64")
    36      8     generator seed (uint64)
    44      8     payload length in bytes (uint64)
    52      ...   coefficients, float64 pairs (real, imag)

Coefficients are written for each wavenumber in lexicographic order of
k in (-n/2, n/2]^d, and for each wavenumber its d components in order.
"""

from __future__ import annotations

import enum
import math
import os
import struct
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spectral import NORMALIZATION_TAG, FourierVectorField, SpectralGrid, hermitian_part, leray_project

MAGIC = b"ESUB"
FORMAT_VERSION = 1
RNG_ALGORITHM = "PCG64"
_HEADER = struct.Struct("<4sHBBI16s8sQQ")


class FieldFileError(Exception):
    """Base class for container errors; ``code`` distinguishes the failure."""

    code = "field-file"


class BadMagicError(FieldFileError):
    code = "bad-magic"


class FormatVersionError(FieldFileError):
    code = "version-mismatch"


class TruncatedFileError(FieldFileError):
    code = "truncated"


class HeaderMismatchError(FieldFileError):
    code = "size-mismatch"


class DimensionMismatchError(FieldFileError):
    code = "dimension-mismatch"


class ProjectedPolarizationWarning(UserWarning):
    """A requested polarization had a component along k and was projected."""


class Kind(str, enum.Enum):
    RANDOM = "random"
    SHEAR = "shear"
    TAYLOR_GREEN_2D = "taylor_green_2d"
    SINGLE_MODE = "single_mode"


@dataclass(frozen=True)
class GeneratorSpec:
    kind: Kind | str = Kind.RANDOM
    seed: int = 0
    decay: float = 2.0
    kmax: int | None = None
    amplitude: float = 1.0
    mode: tuple[int, ...] | None = None
    polarization: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.decay < 0:
            raise ValueError(f"decay exponent must be >= 0, got {self.decay}")

    def validate_for(self, grid: SpectralGrid):
        if self.kmax is not None and not 1 <= self.kmax <= grid.n // 2 - 1:
            raise ValueError(f"kmax must lie in [1, {grid.n // 2 - 1}] for n={grid.n}, got {self.kmax}")
        if self.kind is Kind.SINGLE_MODE:
            if self.mode is None or len(self.mode) != grid.d or not any(self.mode):
                raise ValueError("single_mode needs a nonzero integer mode of length d")
            if max(abs(m) for m in self.mode) > grid.n // 2 - 1:
                raise ValueError(f"mode {self.mode} lies outside the non-Nyquist lattice")
            if self.polarization is None or len(self.polarization) != grid.d:
                raise ValueError("single_mode needs a polarization vector of length d")


def _sine_modes(grid: SpectralGrid, terms) -> FourierVectorField:
    """Coefficients of sum_m b_m sin(k_m . x) for integer k_m and real vectors b_m."""
    coeffs = np.zeros((grid.d,) + grid.shape, dtype=complex)
    norm = (2 * math.pi) ** (grid.d / 2)
    for k, b in terms:
        pos = tuple(int(ki) % grid.n for ki in k)
        neg = tuple(-int(ki) % grid.n for ki in k)
        c = norm * np.asarray(b, dtype=float) / 2j
        coeffs[(slice(None),) + pos] += c
        coeffs[(slice(None),) + neg] += np.conj(c)
    return FourierVectorField(grid, coeffs)


def _random(spec: GeneratorSpec, grid: SpectralGrid) -> FourierVectorField:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    shape = (grid.d,) + grid.shape
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    kabs = grid.k_abs
    kmax = spec.kmax if spec.kmax is not None else grid.n // 2 - 1
    support = (kabs > 0) & (kabs <= kmax)
    weight = np.where(support, np.where(kabs > 0, kabs, 1.0) ** (-spec.decay), 0.0)
    coeffs = hermitian_part(raw * weight, grid.d)
    field = leray_project(FourierVectorField(grid, coeffs))
    energy = float(np.sum(np.abs(field.coeffs) ** 2))
    if energy == 0.0:
        return field
    # rms velocity equals the amplitude
    return field * (spec.amplitude * math.sqrt(grid.volume / energy))


def generate(spec: GeneratorSpec, grid: SpectralGrid) -> FourierVectorField:
    """Solenoidal, mean-zero, Hermitian initial data described by ``spec``."""
    spec.validate_for(grid)
    d, amp = grid.d, spec.amplitude
    if spec.kind is Kind.RANDOM:
        return _random(spec, grid)
    if spec.kind is Kind.SHEAR:
        # v = (A sin x_2, 0, ..., 0)
        k = np.zeros(d, dtype=int)
        k[1] = 1
        b = np.zeros(d)
        b[0] = amp
        return _sine_modes(grid, [(k, b)])
    if spec.kind is Kind.TAYLOR_GREEN_2D:
        # (sin x1 cos x2, -cos x1 sin x2) = ((1,-1)/2) sin(x1+x2) + ((1,1)/2) sin(x1-x2)
        k_plus = np.zeros(d, dtype=int)
        k_plus[:2] = (1, 1)
        k_minus = np.zeros(d, dtype=int)
        k_minus[:2] = (1, -1)
        b_plus = np.zeros(d)
        b_plus[:2] = (0.5 * amp, -0.5 * amp)
        b_minus = np.zeros(d)
        b_minus[:2] = (0.5 * amp, 0.5 * amp)
        return _sine_modes(grid, [(k_plus, b_plus), (k_minus, b_minus)])
    # single mode: amplitude * a placed at +k and -k
    k = np.asarray(spec.mode, dtype=float)
    a = np.asarray(spec.polarization, dtype=float)
    along = float(k @ a)
    if abs(along) > 1e-14 * np.linalg.norm(k) * max(np.linalg.norm(a), 1.0):
        warnings.warn(
            f"polarization {tuple(a)} is not orthogonal to k={spec.mode}; projecting it",
            ProjectedPolarizationWarning,
            stacklevel=2,
        )
        a = a - along * k / (k @ k)
    coeffs = np.zeros((d,) + grid.shape, dtype=complex)
    pos = tuple(int(m) % grid.n for m in spec.mode)
    neg = tuple(-int(m) % grid.n for m in spec.mode)
    coeffs[(slice(None),) + pos] = amp * a
    coeffs[(slice(None),) + neg] = amp * a
    return FourierVectorField(grid, coeffs)


def _lexicographic(coeffs: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Array (k..., component) with k running lexicographically over (-n/2, n/2]."""
    idx = grid.lattice_index()
    ordered = coeffs[(slice(None),) + np.ix_(*([idx] * grid.d))]
    return np.moveaxis(ordered, 0, -1)


def _encode(text: str, width: int) -> bytes:
    raw = text.encode("ascii")
    if len(raw) > width:
        raise ValueError(f"{text!r} does not fit in {width} bytes")
    return raw.ljust(width, b"\0")


def dumps_field(field: FourierVectorField, seed: int = 0, solenoidal: bool | None = None) -> bytes:
    grid = field.grid
    flag = field.solenoidal if solenoidal is None else solenoidal
    ordered = np.ascontiguousarray(_lexicographic(field.coeffs, grid))
    payload = ordered.view(np.float64).astype("<f8").tobytes()
    header = _HEADER.pack(
        MAGIC,
        FORMAT_VERSION,
        grid.d,
        int(bool(flag)),
        grid.n,
        _encode(NORMALIZATION_TAG, 16),
        _encode(RNG_ALGORITHM, 8),
        seed,
        len(payload),
    )
    return header + payload


@dataclass(frozen=True)
class FieldHeader:
    version: int
    d: int
    n: int
    solenoidal: bool
    normalization: str
    rng: str
    seed: int
    payload_bytes: int


def loads_field(data: bytes, expect_dim: int | None = None, expect_modes: int | None = None):
    """Parse a container; returns ``(field, header)``. Never returns a partial field."""
    if len(data) < _HEADER.size:
        raise TruncatedFileError(f"file holds {len(data)} bytes, header needs {_HEADER.size}")
    magic, version, d, flag, n, norm, rng, seed, nbytes = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagicError(f"not a field container (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise FormatVersionError(f"format version {version} unsupported (expected {FORMAT_VERSION})")
    header = FieldHeader(
        version, d, n, bool(flag), norm.rstrip(b"\0").decode("ascii"), rng.rstrip(b"\0").decode("ascii"), seed, nbytes
    )
    if header.normalization != NORMALIZATION_TAG:
        raise FormatVersionError(f"unknown normalization tag {header.normalization!r}")
    if expect_dim is not None and d != expect_dim:
        raise DimensionMismatchError(f"file holds a d={d} field, expected d={expect_dim}")
    if expect_modes is not None and n != expect_modes:
        raise DimensionMismatchError(f"file holds n={n} modes per axis, expected n={expect_modes}")
    try:
        grid = SpectralGrid(d, n)
    except ValueError as exc:
        raise HeaderMismatchError(f"invalid grid in header: {exc}") from exc
    expected = 16 * d * grid.size
    if nbytes != expected:
        raise HeaderMismatchError(f"header declares {nbytes} payload bytes, grid implies {expected}")
    body = data[_HEADER.size :]
    if len(body) < expected:
        raise TruncatedFileError(f"payload holds {len(body)} bytes, expected {expected}")
    if len(body) > expected:
        raise HeaderMismatchError(f"{len(body) - expected} trailing bytes after payload")
    values = np.frombuffer(body, dtype="<f8").astype(np.float64).view(np.complex128)
    ordered = np.moveaxis(values.reshape(grid.shape + (d,)), -1, 0)
    coeffs = np.zeros_like(ordered)
    idx = grid.lattice_index()
    coeffs[(slice(None),) + np.ix_(*([idx] * d))] = ordered
    return FourierVectorField(grid, coeffs), header


def save_field(field: FourierVectorField, path, seed: int = 0, solenoidal: bool | None = None) -> None:
    """Write atomically: the target either keeps its old content or holds the full container."""
    path = Path(path)
    data = dumps_field(field, seed=seed, solenoidal=solenoidal)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_field(path, expect_dim: int | None = None, expect_modes: int | None = None) -> FourierVectorField:
    return loads_field(Path(path).read_bytes(), expect_dim, expect_modes)[0]


def load_field_with_header(path, expect_dim: int | None = None, expect_modes: int | None = None):
    return loads_field(Path(path).read_bytes(), expect_dim, expect_modes)
