"""No-reference quality scores (entropy, UCIQE) and mean CIEDE2000 difference."""

import csv
import io
import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from skimage.color import deltaE_ciede2000, rgb2lab

from .fields import as_rgb

LUMA = np.array([0.299, 0.587, 0.114])
UCIQE_COEFFS = (0.4680, 0.2745, 0.2576)
CSV_FIELDS = ("path", "entropy", "uciqe", "ciede2000")


def gray_levels(img):
    """8-bit quantized luminance."""
    lum = as_rgb(img) @ LUMA
    return np.clip(np.round(lum * 255.0), 0, 255).astype(np.uint8)


def entropy(img):
    """Shannon entropy in bits of the 256-bin luminance histogram."""
    counts = np.bincount(gray_levels(img).ravel(), minlength=256)
    p = counts[counts > 0] / counts.sum()
    return float(max(0.0, -np.sum(p * np.log2(p))))


def uciqe_terms(img):
    """Chroma spread, luminance contrast and mean saturation in CIELab.

    Lightness and the opponent axes are scaled by 1/100 so that each term is
    roughly unit range.  Saturation is chroma over the Lab vector length,
    which stays in [0, 1].
    """
    lab = rgb2lab(as_rgb(img)) / 100.0
    light = lab[..., 0]
    chroma = np.hypot(lab[..., 1], lab[..., 2])
    sigma_c = float(np.std(chroma))
    lo, hi = np.quantile(light, [0.01, 0.99])
    contrast = float(hi - lo)
    length = np.hypot(chroma, light)
    sat = np.divide(chroma, length, out=np.zeros_like(chroma), where=length > 0)
    return sigma_c, contrast, float(np.mean(sat))


def uciqe(img):
    c1, c2, c3 = UCIQE_COEFFS
    sigma_c, contrast, sat = uciqe_terms(img)
    return float(c1 * sigma_c + c2 * contrast + c3 * sat)


def ciede2000(img, ref):
    """Mean per-pixel CIEDE2000 difference between two sRGB images (D65)."""
    img = as_rgb(img)
    ref = as_rgb(ref)
    if img.shape != ref.shape:
        raise ValueError(f"image {img.shape} and reference {ref.shape} differ in shape")
    return float(np.mean(deltaE_ciede2000(rgb2lab(img), rgb2lab(ref))))


@dataclass
class MetricReport:
    entropy: float
    uciqe: float
    ciede2000: Optional[float] = None
    path: str = ""

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def evaluate(img, ref=None, path=""):
    return MetricReport(
        entropy=entropy(img),
        uciqe=uciqe(img),
        ciede2000=None if ref is None else ciede2000(img, ref),
        path=str(path),
    )


def reports_to_csv(reports):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in reports:
        writer.writerow([r.path, repr(r.entropy), repr(r.uciqe),
                         "" if r.ciede2000 is None else repr(r.ciede2000)])
    return buf.getvalue()
