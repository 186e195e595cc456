import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import at, pair_field, random_field
from eulersub.spectral import (
    FourierVectorField,
    HermitianSymmetryError,
    SpectralGrid,
    forward_transform,
    integrate,
    inverse_transform,
    l2_norm_sq,
    leray_project,
    riesz_apply,
    to_physical,
)


def bandlimited_samples(grid, rng):
    # random smooth samples whose spectrum avoids the Nyquist plane
    field = random_field(grid, rng, solenoidal=False)
    coeffs = np.array(field.coeffs)
    coeffs[(slice(None),) + (0,) * grid.d] = rng.standard_normal(grid.d)
    return inverse_transform(FourierVectorField(grid, coeffs))


class TestSpectralGrid:
    @pytest.mark.parametrize("d, n", [(1, 8), (2, 7), (2, 2), (3, 5)])
    def test_rejects_invalid(self, d, n):
        with pytest.raises(ValueError):
            SpectralGrid(d, n)

    def test_lattice(self):
        grid = SpectralGrid(2, 8)
        k = grid.wavenumbers
        assert k.shape == (2, 8, 8)
        assert set(np.unique(k)) == set(range(-4, 4))
        # every non-Nyquist wavenumber has its negation on the lattice
        pairs = {tuple(k[:, i, j]) for i in range(8) for j in range(8) if not grid.nyquist[i, j]}
        assert all(tuple(-x for x in p) in pairs for p in pairs)

    def test_points_and_volume(self):
        grid = SpectralGrid(3, 4)
        assert grid.points[0, 1, 0, 0] == pytest.approx(math.pi / 2)
        assert grid.volume == pytest.approx((2 * math.pi) ** 3)
        assert grid.cell_volume * grid.size == pytest.approx(grid.volume)

    def test_lexicographic_index(self):
        grid = SpectralGrid(2, 8)
        k1 = grid.wavenumbers[0][:, 0][grid.lattice_index()]
        assert list(k1[:-1]) == list(range(-3, 4))
        assert abs(k1[-1]) == 4  # Nyquist slot stands for k = n/2


class TestForwardTransform:
    def test_zero(self):
        grid = SpectralGrid(2, 8)
        field = forward_transform(np.zeros((2, 8, 8)), grid)
        assert np.all(field.coeffs == 0)

    def test_sine_shear(self):
        # sin x2 = (e^{i x2} - e^{-i x2}) / 2i: classical coefficients -+ i/2,
        # scaled by (2 pi)^{d/2} in the unit-Parseval normalization
        grid = SpectralGrid(2, 16)
        samples = np.zeros((2, 16, 16))
        samples[0] = np.sin(grid.points[1])
        field = forward_transform(samples, grid)
        big = np.argwhere(np.abs(field.coeffs) > 1e-12)
        assert sorted(map(tuple, big)) == [(0, 0, 1), (0, 0, 15)]
        norm = 2 * math.pi
        assert at(field.coeffs, grid, (0, 1))[0] == pytest.approx(-0.5j * norm, abs=1e-13)
        assert at(field.coeffs, grid, (0, -1))[0] == pytest.approx(0.5j * norm, abs=1e-13)
        assert abs(at(field.coeffs, grid, (0, 1))[0]) / norm == pytest.approx(0.5)

    @pytest.mark.parametrize("d, n", [(2, 8), (2, 32), (3, 8), (3, 16)])
    def test_roundtrip_samples(self, rng, d, n):
        grid = SpectralGrid(d, n)
        s = bandlimited_samples(grid, rng)
        back = inverse_transform(forward_transform(s, grid))
        assert np.max(np.abs(back - s)) <= 1e-12 * np.max(np.abs(s))

    @pytest.mark.parametrize("d, n", [(2, 16), (3, 8)])
    def test_roundtrip_coefficients(self, rng, d, n):
        grid = SpectralGrid(d, n)
        field = random_field(grid, rng, solenoidal=False)
        again = forward_transform(inverse_transform(field), grid)
        assert np.max(np.abs(again.coeffs - field.coeffs)) <= 1e-12 * field.max_abs()

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            forward_transform(np.zeros((3, 8, 8)), SpectralGrid(2, 8))

    def test_nyquist_discarded(self):
        grid = SpectralGrid(2, 8)
        samples = np.zeros((2, 8, 8))
        samples[0] = np.cos(4 * grid.points[0])  # pure Nyquist content
        assert np.all(forward_transform(samples, grid).coeffs == 0)


class TestInverseTransform:
    def test_zero(self):
        grid = SpectralGrid(2, 8)
        assert np.all(inverse_transform(FourierVectorField.zeros(grid)) == 0)

    def test_sine_pair(self):
        # classical coefficients (0, -+ i/2) at k = +-(1, 0) give (0, sin x1)
        grid = SpectralGrid(2, 16)
        field = pair_field(grid, (1, 0), 2 * math.pi * np.array([0, -0.5j]))
        s = inverse_transform(field)
        assert np.allclose(s[0], 0, atol=1e-14)
        assert np.allclose(s[1], np.sin(grid.points[0]), atol=1e-13)

    def test_rejects_non_hermitian_and_names_mode(self):
        grid = SpectralGrid(2, 8)
        coeffs = np.zeros((2, 8, 8), dtype=complex)
        coeffs[0, 2, 1] = 1.0  # no partner at -k
        with pytest.raises(HermitianSymmetryError, match=r"k=\(2, 1\)"):
            inverse_transform(FourierVectorField(grid, coeffs))

    def test_oversampled_values_agree(self, rng):
        grid = SpectralGrid(2, 8)
        field = random_field(grid, rng)
        fine, fgrid = to_physical(field.coeffs, grid, 3)
        coarse = inverse_transform(field)
        assert fgrid.n == 24
        assert np.allclose(fine[:, ::3, ::3], coarse, atol=1e-12)


class TestLeray:
    def test_longitudinal_annihilated(self):
        grid = SpectralGrid(2, 8)
        out = leray_project(pair_field(grid, (1, 0), np.array([1.0, 0.0])))
        assert np.allclose(out.coeffs, 0)

    def test_transverse_fixed(self):
        grid = SpectralGrid(2, 8)
        field = pair_field(grid, (1, 0), np.array([0.0, 1.0]))
        assert np.allclose(leray_project(field).coeffs, field.coeffs)

    def test_diagonal_mode(self):
        # (1,0) - ((1,1).(1,0)) (1,1) / 2 = (1/2, -1/2)
        grid = SpectralGrid(2, 8)
        out = leray_project(pair_field(grid, (1, 1), np.array([1.0, 0.0])))
        assert np.allclose(at(out.coeffs, grid, (1, 1)), [0.5, -0.5], atol=1e-15)
        assert np.allclose(at(out.coeffs, grid, (-1, -1)), [0.5, -0.5], atol=1e-15)

    def test_removes_mean(self, rng):
        grid = SpectralGrid(2, 8)
        coeffs = np.zeros((2, 8, 8), dtype=complex)
        coeffs[:, 0, 0] = [1.0, 2.0]
        assert np.all(leray_project(FourierVectorField(grid, coeffs)).coeffs == 0)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.sampled_from([2, 3]), n=st.sampled_from([4, 8, 16]))
    def test_projection_properties(self, seed, d, n):
        grid = SpectralGrid(d, n)
        field = random_field(grid, np.random.default_rng(seed), solenoidal=False)
        p = leray_project(field)
        pp = leray_project(p)
        assert np.max(np.abs(pp.coeffs - p.coeffs)) <= 1e-14 * max(p.max_abs(), 1e-300)
        assert l2_norm_sq(p) <= l2_norm_sq(field)
        assert p.solenoidal
        assert p.is_hermitian()


class TestRiesz:
    def test_along_axis(self):
        grid = SpectralGrid(2, 8)
        f = np.zeros((8, 8), dtype=complex)
        f[1, 0] = 2.0 - 1.0j  # k = (1, 0)
        out = riesz_apply(0, f, grid)
        assert out[1, 0] == pytest.approx(1j * (2.0 - 1.0j))

    def test_transverse_zero(self):
        grid = SpectralGrid(2, 8)
        f = np.zeros((8, 8), dtype=complex)
        f[0, 1] = 3.0  # k = (0, 1)
        assert np.all(riesz_apply(0, f, grid) == 0)

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            riesz_apply(2, np.zeros((8, 8)), SpectralGrid(2, 8))

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.sampled_from([2, 3]))
    def test_hermitian_and_contractive(self, seed, d):
        grid = SpectralGrid(d, 8)
        f = random_field(grid, np.random.default_rng(seed), solenoidal=False).coeffs[0]
        for j in range(d):
            out = riesz_apply(j, f, grid)
            assert np.all(np.abs(out) <= np.abs(f) * (1 + 1e-15))
            assert FourierVectorField(grid, np.stack([out] * d)).is_hermitian()


class TestL2Norm:
    def test_zero(self):
        assert l2_norm_sq(FourierVectorField.zeros(SpectralGrid(2, 8))) == 0.0

    def test_pair(self):
        grid = SpectralGrid(2, 8)
        a = 1.7
        field = pair_field(grid, (2, -1), np.array([a * 0.6, a * 0.8j]))
        assert l2_norm_sq(field) == pytest.approx(2 * a**2, rel=1e-15)

    @pytest.mark.parametrize("d", [2, 3])
    @pytest.mark.parametrize("n", [8, 16, 32])
    def test_parseval_against_quadrature(self, rng, d, n):
        grid = SpectralGrid(d, n)
        field = random_field(grid, rng)
        s = inverse_transform(field)
        quad = integrate(np.sum(s**2, axis=0), grid)
        assert abs(quad - l2_norm_sq(field)) <= 1e-10 * l2_norm_sq(field)

    def test_sine_energy(self):
        # int_Q sin^2 x2 = (2 pi)^2 / 2
        grid = SpectralGrid(2, 16)
        samples = np.zeros((2, 16, 16))
        samples[0] = np.sin(grid.points[1])
        assert l2_norm_sq(forward_transform(samples, grid)) == pytest.approx(2 * math.pi**2, rel=1e-14)


def test_fields_are_immutable(rng):
    field = random_field(SpectralGrid(2, 8), rng)
    with pytest.raises(ValueError):
        field.coeffs[0, 1, 1] = 5.0


def test_arithmetic_requires_same_grid(rng):
    a = random_field(SpectralGrid(2, 8), rng)
    b = random_field(SpectralGrid(2, 16), rng)
    with pytest.raises(ValueError, match="grid mismatch"):
        a - b
    assert np.allclose((a - a).coeffs, 0)
    assert np.allclose((2 * a).coeffs, 2 * a.coeffs)
