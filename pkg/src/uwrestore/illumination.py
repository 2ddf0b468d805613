"""Local ambient illumination: windowed maximum, brightness mask, adaptive gamma."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter

from .fields import as_rgb, as_scalar_field
from .guided import MASK_FILTER, guided_filter


@dataclass(frozen=True)
class IlluminationParams:
    patch: int = 2
    theta: float = 0.8
    delta: float = 0.5
    floor: float = 1e-3

    def __post_init__(self):
        if int(self.patch) != self.patch or self.patch < 1:
            raise ValueError("patch half-width must be an integer >= 1")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not self.floor > 0:
            raise ValueError("floor must be positive")


def local_max_illumination(img, params=IlluminationParams()):
    """Per-channel maximum over a ``(2*patch+1)**2`` edge-clipped window."""
    img = as_rgb(img)
    size = (2 * params.patch + 1, 2 * params.patch + 1, 1)
    L0 = maximum_filter(img, size=size, mode="nearest")
    return np.maximum(L0, params.floor)


def brightness_mask(L):
    """1 where a pixel's channel-mean illumination exceeds the global mean of L."""
    L = as_rgb(L)
    return (L.mean(axis=2) > L.mean()).astype(np.float64)


def gamma_map(mask, params=IlluminationParams()):
    """Exponent map ``1 - delta * theta ** ((M - mean M) / (max M - min M))``.

    A constant mask yields a zero exponent, i.e. ``1 - delta`` everywhere.
    """
    mask = as_scalar_field(mask)
    span = mask.max() - mask.min()
    if span > 0:
        expo = (mask - mask.mean()) / span
    else:
        expo = np.zeros_like(mask)
    return 1.0 - params.delta * params.theta ** expo


def apply_gamma(L, gamma):
    L = as_rgb(L)
    gamma = as_scalar_field(gamma)
    if np.any(L <= 0):
        raise ValueError("illumination must be strictly positive before gamma correction")
    return L ** gamma[..., None]


def estimate_illumination(img, params=IlluminationParams(), gf=MASK_FILTER, intermediates=None):
    """Full illumination estimate for a color-corrected image.

    If ``intermediates`` is a dict it receives the stage outputs
    (``L0``, ``mask``, ``mask_refined``, ``gamma``).
    """
    L0 = local_max_illumination(img, params)
    mask = brightness_mask(L0)
    refined = guided_filter(L0.mean(axis=2), mask, gf)
    gamma = gamma_map(refined, params)
    L = np.clip(apply_gamma(L0, gamma), params.floor, 1.0)
    if intermediates is not None:
        intermediates.update(L0=L0, mask=mask, mask_refined=refined, gamma=gamma)
    return L
