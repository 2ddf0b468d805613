"""Grayscale guided filter with edge-clipped box windows."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from .fields import as_scalar_field


@dataclass(frozen=True)
class GuidedFilterParams:
    radius: int = 16
    eps: float = 1e-3

    def __post_init__(self):
        if int(self.radius) != self.radius or self.radius < 1:
            raise ValueError("radius must be an integer >= 1")
        if not self.eps > 0:
            raise ValueError("eps must be positive")


MASK_FILTER = GuidedFilterParams(radius=8, eps=1e-4)
TRANSMISSION_FILTER = GuidedFilterParams(radius=16, eps=1e-3)


def box_mean(f, radius):
    """Mean over the ``(2r+1)**2`` window clipped to the image bounds."""
    f = as_scalar_field(f)
    if radius < 1:
        raise ValueError("radius must be >= 1")
    size = 2 * int(radius) + 1
    sums = uniform_filter(f, size=size, mode="constant", cval=0.0)
    counts = uniform_filter(np.ones_like(f), size=size, mode="constant", cval=0.0)
    return sums / counts


def guided_filter(guide, src, params):
    """He et al.'s guided filter of ``src`` steered by ``guide``."""
    guide = as_scalar_field(guide)
    src = as_scalar_field(src)
    if guide.shape != src.shape:
        raise ValueError(f"guide {guide.shape} and input {src.shape} differ in shape")
    r = params.radius
    mean_i = box_mean(guide, r)
    mean_p = box_mean(src, r)
    cov_ip = box_mean(guide * src, r) - mean_i * mean_p
    var_i = box_mean(guide * guide, r) - mean_i * mean_i

    a = cov_ip / (var_i + params.eps)
    b = mean_p - a * mean_i
    return box_mean(a, r) * guide + box_mean(b, r)
