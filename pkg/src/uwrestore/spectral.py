"""FFT solves for the coupled vector-field systems ``r*u - grad(div u) = h``.

Inside these solves the difference operators are periodic: ``grad`` is the
forward difference and ``div`` the backward difference, both wrapping around.
Under the FFT the system decouples into one 2x2 complex system per frequency,
which is solved exactly by Cramer's rule.  The determinant equals
``r**2 - 2*r*(cos Zx + cos Zy - 2)``.

FFT convention: forward unnormalized, inverse scaled by ``1 / (N1 * N2)``.
"""

import numpy as np
from scipy import fft

from .fields import as_scalar_field, as_vector_field


def fft2_forward(f):
    return fft.fft2(as_scalar_field(f), workers=-1)


def fft2_inverse(F, imag_tol=None):
    """Inverse FFT keeping the real part.

    With ``imag_tol`` set, raise if the discarded imaginary part exceeds it.
    """
    out = fft.ifft2(F, workers=-1)
    if imag_tol is not None:
        resid = np.abs(out.imag).max(initial=0.0)
        if resid > imag_tol:
            raise ValueError(f"inverse FFT has imaginary residue {resid:.3e}")
    return out.real


class SpectralKernel:
    """Frequency tables and 2x2 system coefficients for one grid and ratio.

    ``ratio`` is ``mu4/mu3`` for the normalized-gradient field and
    ``mu5/mu6`` for the illumination-gradient field.
    """

    def __init__(self, shape, ratio):
        if ratio <= 0:
            raise ValueError(f"spectral ratio must be positive, got {ratio}")
        n1, n2 = shape
        self.shape = (int(n1), int(n2))
        self.ratio = float(ratio)

        zi = 2.0 * np.pi * np.arange(n1) / n1
        zj = 2.0 * np.pi * np.arange(n2) / n2
        self.cos_zi, self.sin_zi = np.cos(zi), np.sin(zi)
        self.cos_zj, self.sin_zj = np.cos(zj), np.sin(zj)

        # symbols of forward/backward differences along x (columns) and y (rows)
        fwd_x = (np.exp(1j * zj) - 1.0)[None, :]
        bwd_x = (1.0 - np.exp(-1j * zj))[None, :]
        fwd_y = (np.exp(1j * zi) - 1.0)[:, None]
        bwd_y = (1.0 - np.exp(-1j * zi))[:, None]

        r = self.ratio
        cx = self.cos_zj[None, :]
        cy = self.cos_zi[:, None]
        self.a11 = np.broadcast_to(r - 2.0 * (cx - 1.0), self.shape)
        self.a22 = np.broadcast_to(r - 2.0 * (cy - 1.0), self.shape)
        self.a12 = -fwd_x * bwd_y
        self.a21 = -fwd_y * bwd_x
        self.det = r * r - 2.0 * r * (cx + cy - 2.0)
        if np.any(self.det <= 0):
            raise ValueError("spectral system is singular at some frequency")

    def solve(self, h1, h2):
        return solve_coupled_field(h1, h2, self)


def solve_coupled_field(h1, h2, kernel, imag_tol=1e-10):
    """Solve ``ratio*u - grad(div u) = (h1, h2)`` with periodic stencils.

    Returns the ``(2, H, W)`` solution field.
    """
    h1 = as_scalar_field(h1)
    h2 = as_scalar_field(h2)
    if h1.shape != kernel.shape or h2.shape != kernel.shape:
        raise ValueError(f"right-hand side {h1.shape}/{h2.shape} does not match kernel {kernel.shape}")
    H1 = fft2_forward(h1)
    H2 = fft2_forward(h2)
    U1 = (kernel.a22 * H1 - kernel.a12 * H2) / kernel.det
    U2 = (kernel.a11 * H2 - kernel.a21 * H1) / kernel.det
    scale = imag_tol * max(1.0, np.abs(h1).max(initial=0.0), np.abs(h2).max(initial=0.0))
    return np.stack([fft2_inverse(U1, scale), fft2_inverse(U2, scale)])


def periodic_gradient(f):
    f = as_scalar_field(f)
    return np.stack([np.roll(f, -1, axis=1) - f, np.roll(f, -1, axis=0) - f])


def periodic_divergence(v):
    v = as_vector_field(v)
    return (v[0] - np.roll(v[0], 1, axis=1)) + (v[1] - np.roll(v[1], 1, axis=0))


def coupled_operator(u, ratio):
    """Apply ``ratio*u - grad(div u)`` with periodic stencils."""
    return ratio * as_vector_field(u) - periodic_gradient(periodic_divergence(u))
