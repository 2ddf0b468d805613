import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import periodic_system_matrix
from uwrestore.spectral import (SpectralKernel, coupled_operator, fft2_forward, fft2_inverse,
                                periodic_divergence, periodic_gradient, solve_coupled_field)


def stencil_operator(u, ratio):
    """Same operator written out with explicit index arithmetic."""
    _, h, w = u.shape
    out = ratio * u.copy()
    div = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            div[i, j] = u[0, i, j] - u[0, i, j - 1] + u[1, i, j] - u[1, i - 1, j]
    for i in range(h):
        for j in range(w):
            out[0, i, j] -= div[i, (j + 1) % w] - div[i, j]
            out[1, i, j] -= div[(i + 1) % h, j] - div[i, j]
    return out


def test_operator_matches_explicit_stencil():
    u = np.random.default_rng(31).normal(size=(2, 5, 4))
    assert np.allclose(coupled_operator(u, 0.7), stencil_operator(u, 0.7), atol=1e-13)
    dense = periodic_system_matrix((5, 4), 0.7) @ u.ravel()
    assert np.allclose(coupled_operator(u, 0.7).ravel(), dense, atol=1e-13)


@pytest.mark.parametrize("n", [4, 8])
@pytest.mark.parametrize("ratio", [0.1, 1.0, 10.0])
def test_matches_dense_solve(n, ratio):
    rng = np.random.default_rng(n * 100 + int(ratio * 10))
    A = periodic_system_matrix((n, n), ratio)
    kernel = SpectralKernel((n, n), ratio)
    for _ in range(10):
        h = rng.normal(size=(2, n, n))
        ref = np.linalg.solve(A, h.ravel()).reshape(h.shape)
        got = solve_coupled_field(h[0], h[1], kernel)
        assert np.linalg.norm(got - ref) / np.linalg.norm(ref) < 1e-8


def test_rectangular_grid_residual():
    rng = np.random.default_rng(32)
    h = rng.normal(size=(2, 6, 10))
    kernel = SpectralKernel((6, 10), 0.3)
    u = kernel.solve(h[0], h[1])
    assert np.linalg.norm(coupled_operator(u, 0.3) - h) / np.linalg.norm(h) < 1e-12


def test_zero_rhs():
    kernel = SpectralKernel((5, 7), 2.0)
    assert np.all(solve_coupled_field(np.zeros((5, 7)), np.zeros((5, 7)), kernel) == 0)


def test_dc_component():
    kernel = SpectralKernel((4, 6), 0.25)
    u = solve_coupled_field(np.full((4, 6), 3.0), np.zeros((4, 6)), kernel)
    assert np.allclose(u[0], 12.0, atol=1e-12)
    assert np.allclose(u[1], 0.0, atol=1e-12)


def test_linearity():
    rng = np.random.default_rng(33)
    kernel = SpectralKernel((8, 8), 1.5)
    a, b = rng.normal(size=(2, 2, 8, 8))
    lhs = solve_coupled_field(*(2 * a - 3 * b), kernel)
    rhs = 2 * solve_coupled_field(*a, kernel) - 3 * solve_coupled_field(*b, kernel)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_determinant_is_exact_product_form():
    kernel = SpectralKernel((6, 9), 0.4)
    exact = kernel.a11 * kernel.a22 - kernel.a12 * kernel.a21
    assert np.allclose(exact.imag, 0, atol=1e-12)
    assert np.allclose(exact.real, kernel.det, atol=1e-12)
    assert np.all(kernel.det > 0)


def test_tables():
    kernel = SpectralKernel((3, 5), 1.0)
    assert kernel.cos_zi.shape == (3,) and kernel.sin_zj.shape == (5,)
    assert kernel.cos_zi[0] == 1.0


def test_kernel_errors():
    with pytest.raises(ValueError):
        SpectralKernel((4, 4), 0.0)
    kernel = SpectralKernel((4, 4), 1.0)
    with pytest.raises(ValueError):
        solve_coupled_field(np.zeros((4, 5)), np.zeros((4, 5)), kernel)


def test_fft_round_trip_and_imag_guard():
    f = np.random.default_rng(34).normal(size=(6, 5))
    assert np.allclose(fft2_inverse(fft2_forward(f), imag_tol=1e-12), f, atol=1e-13)
    with pytest.raises(ValueError):
        fft2_inverse(np.full((2, 2), 1j), imag_tol=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2 ** 32 - 1))
def test_periodic_adjoint(h, w, seed):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(h, w))
    v = rng.normal(size=(2, h, w))
    lhs = np.vdot(periodic_gradient(f), v)
    rhs = -np.vdot(f, periodic_divergence(v))
    assert abs(lhs - rhs) < 1e-10
