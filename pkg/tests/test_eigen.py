import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulersub.eigen import (
    AsymmetricMatrixError,
    jacobi_eigenvalues,
    lambda_max,
    lambda_max_closed_form,
    lambda_max_jacobi,
    lambda_max_power,
)

METHODS = ["closed", "jacobi", "power"]


def random_symmetric(rng, d, count=None):
    shape = (d, d) if count is None else (count, d, d)
    a = rng.standard_normal(shape)
    return 0.5 * (a + np.swapaxes(a, -1, -2))


class TestExamples:
    @pytest.mark.parametrize("method", METHODS)
    def test_diagonal(self, method):
        assert lambda_max(np.diag([2.0, -1.0]), method) == pytest.approx(2.0, abs=1e-14)

    @pytest.mark.parametrize("method", METHODS)
    @pytest.mark.parametrize("d", [2, 3])
    def test_zero(self, method, d):
        assert lambda_max(np.zeros((d, d)), method) == 0.0

    @pytest.mark.parametrize("method", METHODS)
    def test_swap(self, method):
        # characteristic polynomial lambda^2 - 1
        assert lambda_max(np.array([[0.0, 1.0], [1.0, 0.0]]), method) == pytest.approx(1.0, abs=1e-14)

    def test_jacobi_vs_power_5x5(self, rng):
        m = random_symmetric(rng, 5)
        assert lambda_max(m, "jacobi") == pytest.approx(float(lambda_max_power(m)), abs=1e-10)

    def test_returns_float_for_single_matrix(self):
        assert isinstance(lambda_max(np.eye(3)), float)

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="unknown"):
            lambda_max(np.eye(2), "qr")

    def test_no_closed_form_above_three(self):
        with pytest.raises(ValueError):
            lambda_max_closed_form(np.eye(4))


class TestValidation:
    @pytest.mark.parametrize("method", METHODS)
    def test_asymmetric_rejected(self, method):
        with pytest.raises(AsymmetricMatrixError):
            lambda_max(np.array([[0.0, 1.0], [0.0, 0.0]]), method)

    def test_tiny_asymmetry_tolerated(self):
        m = np.array([[1.0, 0.5], [0.5 + 1e-14, 2.0]])
        lambda_max(m)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError, match="square"):
            lambda_max(np.zeros((2, 3)))


class TestDegenerate:
    @pytest.mark.parametrize("method", METHODS)
    def test_repeated_top(self, method):
        assert lambda_max(np.diag([1.0, 1.0, -2.0]), method) == pytest.approx(1.0, abs=1e-13)

    @pytest.mark.parametrize("method", METHODS)
    def test_repeated_bottom(self, method):
        assert lambda_max(np.diag([2.0, -1.0, -1.0]), method) == pytest.approx(2.0, abs=1e-13)

    @pytest.mark.parametrize("method", METHODS)
    def test_scalar_multiple_of_identity(self, method):
        assert lambda_max(-3.0 * np.eye(3), method) == pytest.approx(-3.0, abs=1e-13)

    @pytest.mark.parametrize("method", METHODS)
    def test_rotated_degenerate(self, method, rng):
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        m = q @ np.diag([0.5, 0.5, -1.0]) @ q.T
        m = 0.5 * (m + m.T)
        assert lambda_max(m, method) == pytest.approx(0.5, abs=1e-12)

    def test_negative_definite(self):
        # the shift in the power route must keep the top eigenvalue dominant
        m = np.diag([-1.0, -2.0, -5.0, -7.0])
        assert lambda_max(m, "power") == pytest.approx(-1.0, abs=1e-12)


class TestAgreement:
    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_against_lapack(self, rng, d):
        m = random_symmetric(rng, d, 2000)
        ref = np.linalg.eigvalsh(m)[:, -1]
        for method in (["closed"] if d <= 3 else []) + ["jacobi", "power"]:
            assert np.max(np.abs(lambda_max(m, method) - ref)) <= 1e-10

    def test_full_spectrum(self, rng):
        m = random_symmetric(rng, 6, 500)
        ours = np.sort(jacobi_eigenvalues(m), axis=-1)
        assert np.max(np.abs(ours - np.linalg.eigvalsh(m))) <= 1e-12

    def test_batched_shape(self, rng):
        m = random_symmetric(rng, 3, 12).reshape(3, 4, 3, 3)
        for fn in (lambda_max_closed_form, lambda_max_jacobi, lambda_max_power):
            assert fn(m).shape == (3, 4)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 6), scale=st.floats(1e-6, 1e6))
    def test_routes_agree(self, seed, d, scale):
        m = scale * random_symmetric(np.random.default_rng(seed), d)
        vals = [lambda_max(m, meth) for meth in (["closed"] if d <= 3 else []) + ["jacobi", "power"]]
        assert max(vals) - min(vals) <= 1e-10 * scale

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 6), c=st.floats(0.0, 100.0))
    def test_homogeneity(self, seed, d, c):
        m = random_symmetric(np.random.default_rng(seed), d)
        assert lambda_max(c * m) == pytest.approx(c * lambda_max(m), abs=1e-12 * max(1.0, c))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 6))
    def test_rayleigh_bound(self, seed, d):
        # lambda_max dominates every Rayleigh quotient and the mean eigenvalue
        rng = np.random.default_rng(seed)
        m = random_symmetric(rng, d)
        top = lambda_max(m)
        x = rng.standard_normal(d)
        assert x @ m @ x / (x @ x) <= top + 1e-12
        assert np.trace(m) / d <= top + 1e-12
