"""Adaptive channel compensation followed by statistical color balance."""

from dataclasses import dataclass

import numpy as np

from .fields import as_rgb


@dataclass(frozen=True)
class ColorParams:
    d: float = 5.0
    phi: float = 2.3
    epsilon_var: float = 1e-6

    def __post_init__(self):
        if not (self.d > 0 and self.phi > 0 and self.epsilon_var > 0):
            raise ValueError("ColorParams requires d > 0, phi > 0, epsilon_var > 0")


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def channel_means(img):
    """Arithmetic mean of the R, G and B channels."""
    img = as_rgb(img)
    m = img.reshape(-1, 3).mean(axis=0)
    return float(m[0]), float(m[1]), float(m[2])


def _boost(channel, gap, d):
    weight = (1.0 - sigmoid(channel)) ** 2
    return channel + d * weight * gap * channel


def compensate_channels(img, params=ColorParams()):
    """Boost the attenuated channels using the strongest of green/blue as donor.

    If the green mean is at least the blue mean, green is the donor and red and
    blue are compensated; otherwise blue is the donor.  Each boost is scaled by
    ``(1 - sigmoid(I_c))**2`` so bright pixels receive less.  The donor channel
    is returned unchanged and the result is clipped to ``[0, 1]``.
    """
    img = as_rgb(img)
    mr, mg, mb = channel_means(img)
    out = img.copy()
    r, g, b = img[..., 0], img[..., 1], img[..., 2]
    if mg >= mb:
        out[..., 0] = _boost(r, mg - mr, params.d)
        out[..., 2] = _boost(b, mg - mb, params.d)
    else:
        out[..., 0] = _boost(r, mb - mr, params.d)
        out[..., 1] = _boost(g, mb - mg, params.d)
    return np.clip(out, 0.0, 1.0)


def color_balance(img, params=ColorParams(), clip=True):
    """Stretch every channel to ``0.5 * (1 + (I - mean) / (phi * std))``.

    With ``clip=False`` the unclipped values are returned; their channel means
    are exactly 0.5.
    """
    img = as_rgb(img)
    flat = img.reshape(-1, 3)
    mean = flat.mean(axis=0)
    spread = np.maximum(flat.std(axis=0), params.epsilon_var)
    out = 0.5 * (1.0 + (img - mean) / (params.phi * spread))
    if clip:
        out = np.clip(out, 0.0, 1.0)
    return out


def correct_color(img, params=ColorParams()):
    return color_balance(compensate_channels(img, params), params)
