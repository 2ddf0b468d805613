"""End-to-end restoration: image I/O, stage orchestration, batch runs and dumps.

Stage order is fixed: compensate, balance, illumination, transmission, solve.
"""

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import admm, metrics
from .color import color_balance, compensate_channels
from .config import PipelineConfig
from .fields import as_rgb
from .illumination import estimate_illumination
from .transmission import estimate_transmission

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")
ACCEPTED_MODES = ("RGB", "RGBA", "L", "LA", "P")
BATCH_FIELDS = ("path", "entropy", "uciqe", "ciede2000", "iterations", "converged")


class ImageReadError(OSError):
    pass


class UnsupportedFormat(ValueError):
    pass


class EmptyBatch(ValueError):
    pass


def load_image(path):
    """Read an 8-bit PNG/JPEG as an ``(H, W, 3)`` float image in ``[0, 1]``."""
    path = Path(path)
    if path.suffix.lower() not in IMAGE_SUFFIXES:
        raise UnsupportedFormat(f"{path}: only PNG and JPEG inputs are supported")
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode not in ACCEPTED_MODES:
                raise UnsupportedFormat(f"{path}: unsupported pixel mode {im.mode}")
            arr = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ImageReadError(f"{path}: cannot read image ({exc})") from None
    if arr.shape[0] < 2 or arr.shape[1] < 2:
        raise UnsupportedFormat(f"{path}: image must be at least 2x2")
    return arr


def to_uint8(img):
    return np.clip(np.round(np.asarray(img, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def save_png(img, path):
    """Write without metadata so repeated runs give identical bytes."""
    arr = to_uint8(img)
    mode = "L" if arr.ndim == 2 else "RGB"
    Image.fromarray(arr, mode=mode).save(path, format="PNG", optimize=False)


def quantize(img):
    return to_uint8(img).astype(np.float64) / 255.0


@dataclass
class Restoration:
    image: np.ndarray
    reflectance: np.ndarray
    illumination: np.ndarray
    reports: list
    stages: dict = field(default_factory=dict)

    @property
    def iterations(self):
        return max(r.iterations for r in self.reports)

    @property
    def converged(self):
        return all(r.converged for r in self.reports)


def restore_image(img, config=PipelineConfig()):
    """Run every stage on an in-memory image."""
    img = as_rgb(img)
    stages = {"input": img}
    compensated = compensate_channels(img, config.color)
    balanced = color_balance(compensated, config.color)
    stages.update(compensated=compensated, balanced=balanced)

    L = estimate_illumination(balanced, config.illumination, config.mask_filter, stages)
    stages["L"] = L
    t = estimate_transmission(balanced, L, config.transmission, config.transmission_filter,
                              floor=config.illumination.floor, intermediates=stages)

    R, L_solved, reports = admm.restore(balanced, L, t, config.solver)
    stages.update(R=R, L_solved=L_solved)
    if config.output.display == "lit":
        out = np.clip(R * np.clip(L_solved, 0.0, None) ** config.output.rho, 0.0, 1.0)
    else:
        out = R
    return Restoration(out, R, L_solved, reports, stages)


def _check_size(img, config, path):
    h, w = img.shape[:2]
    if max(h, w) > config.output.size_cap:
        log.warning("%s is %dx%d, above the %d px cap; processing at full size",
                    path, w, h, config.output.size_cap)


def default_output(path, config):
    path = Path(path)
    return path.with_name(path.stem + config.output.suffix + ".png")


@dataclass
class RunResult:
    input: Path
    output: Path
    metrics: metrics.MetricReport
    restoration: Restoration

    def report_dict(self):
        return {
            "input": str(self.input),
            "output": str(self.output),
            "metrics": self.metrics.to_dict(),
            "solver": {
                "iterations": self.restoration.iterations,
                "converged": self.restoration.converged,
                "channels": [r.to_dict() for r in self.restoration.reports],
            },
        }


def write_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_single(path, config=PipelineConfig(), output=None, reference=None, report=None):
    """Restore one file and write the PNG (plus optional panel and JSON report)."""
    path = Path(path)
    img = load_image(path)
    _check_size(img, config, path)
    ref = None
    if reference is not None:
        ref = load_image(reference)
        if ref.shape != img.shape:
            raise ValueError(f"reference {reference} does not match {path} in size")

    result = restore_image(img, config)
    out_path = Path(output) if output is not None else default_output(path, config)
    save_png(result.image, out_path)
    if config.output.panel:
        save_png(np.concatenate([img, result.image], axis=1),
                 out_path.with_name(out_path.stem + "_panel.png"))

    scores = metrics.evaluate(quantize(result.image), ref, path=str(path))
    run = RunResult(path, out_path, scores, result)
    report = report if report is not None else (config.output.report or None)
    if report:
        write_json(run.report_dict(), report)
    if config.output.dump_intermediates:
        write_stages(result.stages, out_path.with_name(out_path.stem + "_stages"), config)
    return run


def list_images(directory):
    directory = Path(directory)
    if not directory.is_dir():
        raise ImageReadError(f"{directory}: not a directory")
    files = sorted(p for p in directory.iterdir()
                   if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise EmptyBatch(f"{directory}: no PNG or JPEG images found")
    return files


@dataclass
class BatchResult:
    rows: list
    failures: list
    csv_path: Path = None
    json_path: Path = None

    def mean_row(self):
        if not self.rows:
            return None
        cols = {k: [r[k] for r in self.rows] for k in BATCH_FIELDS[1:]}
        out = {"path": "MEAN"}
        for k, vals in cols.items():
            if any(v is None for v in vals):
                out[k] = None
            else:
                out[k] = float(np.mean([float(v) for v in vals]))
        return out

    @property
    def partial(self):
        return bool(self.failures)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(BATCH_FIELDS)
        rows = self.rows + ([self.mean_row()] if self.rows else [])
        for r in rows:
            writer.writerow(["" if r[k] is None else
                             (repr(r[k]) if isinstance(r[k], float) else str(r[k]))
                             for k in BATCH_FIELDS])
        return buf.getvalue()

    def to_dict(self):
        return {"rows": self.rows, "mean": self.mean_row(), "failures": self.failures}


def run_batch(directory, config=PipelineConfig(), out_dir=None, reference_dir=None):
    """Restore every PNG/JPEG in ``directory``; failures are logged and skipped.

    Outputs go to ``out_dir`` (default ``<directory>/restored``) together with
    ``summary.csv`` and ``summary.json``.
    """
    files = list_images(directory)
    out_dir = Path(out_dir) if out_dir is not None else Path(directory) / "restored"
    out_dir.mkdir(parents=True, exist_ok=True)

    def work(path):
        ref = None
        if reference_dir is not None:
            ref = Path(reference_dir) / path.name
        out = out_dir / (path.stem + config.output.suffix + ".png")
        try:
            run = run_single(path, config, output=out, reference=ref, report=False)
        except (ImageReadError, UnsupportedFormat, ValueError, admm.SolverDivergence) as exc:
            log.error("failed on %s: %s", path, exc)
            return path, None, str(exc)
        return path, run, None

    with ThreadPoolExecutor(max_workers=config.output.workers) as pool:
        outcomes = list(pool.map(work, files))

    rows, failures = [], []
    for path, run, err in outcomes:
        if run is None:
            failures.append({"path": str(path), "error": err})
            continue
        rows.append({
            "path": str(path),
            "entropy": run.metrics.entropy,
            "uciqe": run.metrics.uciqe,
            "ciede2000": run.metrics.ciede2000,
            "iterations": run.restoration.iterations,
            "converged": int(run.restoration.converged),
        })
    result = BatchResult(rows, failures, out_dir / "summary.csv", out_dir / "summary.json")
    result.csv_path.write_text(result.to_csv(), encoding="utf-8")
    write_json(result.to_dict(), result.json_path)
    return result


DUMP_STAGES = ("compensated", "balanced", "L0", "mask", "mask_refined", "gamma", "L",
               "t_raw", "t", "R", "L_solved")


def write_stages(stages, out_dir, config=PipelineConfig()):
    """Write the selected intermediates as PNGs scaled from [0, 1] to [0, 255]."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in DUMP_STAGES:
        if name not in stages:
            continue
        target = out_dir / f"{name}.png"
        save_png(np.clip(stages[name], 0.0, 1.0), target)
        written.append(target)
    return written


def dump_intermediates(path, config=PipelineConfig(), out_dir=None):
    path = Path(path)
    img = load_image(path)
    result = restore_image(img, config)
    out_dir = out_dir if out_dir is not None else path.with_name(path.stem + "_stages")
    return write_stages(result.stages, out_dir, config)

