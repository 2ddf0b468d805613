"""Synthetic fixtures: forward-model images and underwater-looking degradations."""

import numpy as np
from skimage import data
from skimage.transform import resize


def forward_model(R, L, t):
    """Observed intensity ``R*L*t + L*(1 - t)``."""
    return R * L * t + L * (1.0 - t)


def forward_fixture(n=64):
    """Known reflectance, illumination and transmission on an ``n x n`` grid.

    Reflectance is piecewise constant (a disk and a vertical band), the other
    two fields are smooth.  Returns ``(I, R, L, t)``.
    """
    y, x = np.mgrid[0:n, 0:n] / (n - 1)
    R = 0.3 + 0.4 * ((x - 0.5) ** 2 + (y - 0.5) ** 2 < 0.09) + 0.2 * (x > 0.75)
    L = 0.75 + 0.1 * np.cos(np.pi * x) * np.cos(np.pi * y)
    t = 0.6 + 0.3 * np.cos(np.pi * x / 2) * np.cos(np.pi * y / 2)
    return forward_model(R, L, t), R, L, t


# attenuation per unit depth (red fastest) and the veiling light color
WATER_ATTENUATION = np.array([1.6, 0.45, 0.6])
VEILING_LIGHT = np.array([0.08, 0.55, 0.62])

# (sample name, (top, bottom, left, right) crop as fractions of the frame)
SCENES = (
    ("astronaut", None),
    ("coffee", None),
    ("chelsea", None),
    ("rocket", None),
    ("immunohistochemistry", None),
    ("colorwheel", None),
    ("retina", None),
    ("hubble_deep_field", None),
    ("logo", None),
    ("astronaut", (0.0, 0.5, 0.25, 0.75)),
)


def _rgb(name):
    img = np.asarray(getattr(data, name)())
    if img.ndim == 2:
        img = np.repeat(img[..., None], 3, axis=2)
    img = img[..., :3].astype(np.float64)
    return img / 255.0 if img.max() > 1.0 else img


def underwater(img, depth_range=(0.4, 1.6), attenuation=WATER_ATTENUATION,
               veiling=VEILING_LIGHT):
    """Apply wavelength-dependent attenuation and backscatter with a top-far depth ramp."""
    h, w = img.shape[:2]
    depth = np.linspace(depth_range[1], depth_range[0], h)[:, None, None] * np.ones((1, w, 1))
    t = np.exp(-attenuation[None, None, :] * depth)
    return np.clip(img * t + veiling[None, None, :] * (1.0 - t), 0.0, 1.0)


def uieb_like_samples(size=160, scenes=SCENES):
    """Degraded versions of the scikit-image sample photographs.

    Each scene is cropped, resized so its long side is ``size`` pixels, then
    degraded with :func:`underwater`.  Returns a list of ``(label, image)``.
    """
    out = []
    for name, crop in scenes:
        img = _rgb(name)
        label = name
        if crop is not None:
            h, w = img.shape[:2]
            top, bottom, left, right = crop
            img = img[round(top * h):round(bottom * h), round(left * w):round(right * w)]
            label = f"{name}_crop"
        h, w = img.shape[:2]
        scale = size / max(h, w)
        shape = (max(2, round(h * scale)), max(2, round(w * scale)), 3)
        small = resize(img, shape, order=1, anti_aliasing=True)
        out.append((label, underwater(small)))
    return out
