"""Discrete differential operators on 2-D grids.

Conventions used across the package:

* a scalar field is a 2-D ``float64`` array indexed ``[row, col]`` (``i = y``, ``j = x``);
* a vector field is an array of shape ``(2, H, W)``; index 0 is the x (column)
  component and index 1 the y (row) component;
* an RGB image is an ``(H, W, 3)`` array with values nominally in ``[0, 1]``.

The gradient uses forward differences with a replicate boundary, so the
derivative across the last row/column is zero.  The divergence is its
negative adjoint (backward differences), which makes ``divergence(gradient(f))``
the 5-point Laplacian with Neumann boundary.
"""

import numpy as np


def as_scalar_field(f):
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 2:
        raise ValueError(f"expected a 2-D scalar field, got shape {f.shape}")
    return f


def as_vector_field(v):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 3 or v.shape[0] != 2:
        raise ValueError(f"expected a (2, H, W) vector field, got shape {v.shape}")
    return v


def as_rgb(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {img.shape}")
    if img.shape[0] == 0 or img.shape[1] == 0:
        raise ValueError("image has no pixels")
    return img


def gradient(f):
    """Forward-difference gradient, shape ``(2, H, W)``."""
    f = as_scalar_field(f)
    g = np.zeros((2,) + f.shape)
    g[0, :, :-1] = f[:, 1:] - f[:, :-1]
    g[1, :-1, :] = f[1:, :] - f[:-1, :]
    return g


def divergence(v):
    """Backward-difference divergence; satisfies <grad f, v> = -<f, div v>."""
    v = as_vector_field(v)
    vx, vy = v
    d = np.zeros(vx.shape)

    d[:, 0] += vx[:, 0]
    d[:, 1:-1] += vx[:, 1:-1] - vx[:, :-2]
    if vx.shape[1] > 1:
        d[:, -1] -= vx[:, -2]
    else:
        d[:, 0] -= vx[:, 0]

    d[0, :] += vy[0, :]
    d[1:-1, :] += vy[1:-1, :] - vy[:-2, :]
    if vy.shape[0] > 1:
        d[-1, :] -= vy[-2, :]
    else:
        d[0, :] -= vy[0, :]
    return d


def neighbor_sum(f):
    """Sum of the four replicate-padded neighbours of every pixel."""
    f = as_scalar_field(f)
    p = np.pad(f, 1, mode="edge")
    return p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:]


def laplacian(f):
    """5-point Laplacian with replicate boundary."""
    f = as_scalar_field(f)
    return neighbor_sum(f) - 4.0 * f


def magnitude(v):
    """Pointwise Euclidean norm of a vector field."""
    v = as_vector_field(v)
    return np.sqrt(v[0] * v[0] + v[1] * v[1])


def inner(a, b):
    """Flat inner product of two equally shaped fields."""
    return float(np.vdot(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)))


def luminance(img):
    """Channel mean of an RGB image."""
    return as_rgb(img).mean(axis=2)
