"""Transmission from the min-operator on the illumination-aware formation model."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import minimum_filter

from .fields import as_rgb
from .guided import TRANSMISSION_FILTER, guided_filter


@dataclass(frozen=True)
class TransmissionParams:
    patch: int = 7
    t_min: float = 0.05

    def __post_init__(self):
        if int(self.patch) != self.patch or self.patch < 1:
            raise ValueError("patch half-width must be an integer >= 1")
        if not 0 < self.t_min < 1:
            raise ValueError("t_min must lie in (0, 1)")


def raw_transmission(img, L, patch=7):
    """``1 - min_{y in patch(x)} min_c clip(I_c(y) / L_c(x), 0, 1)``.

    ``L`` is sampled at the window centre, so the inner minimum reduces to the
    windowed minimum of each channel divided by the centre illumination.
    """
    img = as_rgb(img)
    L = as_rgb(L)
    if img.shape != L.shape:
        raise ValueError(f"image {img.shape} and illumination {L.shape} differ in shape")
    if np.any(L <= 0):
        raise ValueError("illumination must be strictly positive")
    size = (2 * patch + 1, 2 * patch + 1, 1)
    local_min = minimum_filter(img, size=size, mode="nearest")
    ratio = np.clip(local_min / L, 0.0, 1.0)
    return 1.0 - ratio.min(axis=2)


def estimate_transmission(img, L, params=TransmissionParams(), gf=TRANSMISSION_FILTER,
                          floor=1e-3, intermediates=None):
    """Shared transmission map for all three channels, clamped to ``[t_min, 1]``.

    The raw map is refined by a guided filter with the luminance of ``img`` as
    guide, then clamped again since the filter may overshoot.
    """
    img = as_rgb(img)
    L = as_rgb(L)
    if np.any(L < floor):
        raise ValueError(f"illumination below floor {floor}")
    raw = raw_transmission(img, L, params.patch)
    t = np.clip(raw, params.t_min, 1.0)
    t = guided_filter(img.mean(axis=2), t, gf)
    t = np.clip(t, params.t_min, 1.0)
    if intermediates is not None:
        intermediates.update(t_raw=raw, t=t)
    return t
