import numpy as np
import pytest

from eulersub.spectral import FourierVectorField, SpectralGrid, hermitian_part, leray_project

ACCEPTANCE_LINES: list[str] = []


def random_field(grid: SpectralGrid, rng: np.random.Generator, solenoidal: bool = True, kmax: float | None = None):
    """Hermitian random coefficients built independently of the package generators."""
    shape = (grid.d,) + grid.shape
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if kmax is not None:
        raw = raw * (grid.k_abs <= kmax)
    field = FourierVectorField(grid, hermitian_part(raw, grid.d))
    return leray_project(field) if solenoidal else field


def pair_field(grid: SpectralGrid, k, vec) -> FourierVectorField:
    """vhat(k) = vec, vhat(-k) = conj(vec), zero elsewhere."""
    coeffs = np.zeros((grid.d,) + grid.shape, dtype=complex)
    pos = tuple(int(x) % grid.n for x in k)
    neg = tuple(-int(x) % grid.n for x in k)
    coeffs[(slice(None),) + pos] = vec
    coeffs[(slice(None),) + neg] = np.conj(vec)
    return FourierVectorField(grid, coeffs)


def at(field_coeffs: np.ndarray, grid: SpectralGrid, k) -> np.ndarray:
    return field_coeffs[(Ellipsis,) + tuple(int(x) % grid.n for x in k)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def record_acceptance(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" :: {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
