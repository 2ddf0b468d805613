"""Walk one degraded image through every stage and save the intermediates.

A scikit-image sample photo is given a blue-green cast and depth-dependent
haze, then restored.  Each stage is written as a PNG next to a before/after
panel.

    python3 demos/02_pipeline_stages.py [output_dir]
"""

import sys
from pathlib import Path

import numpy as np

from uwrestore import metrics
from uwrestore.pipeline import quantize, restore_image, save_png, write_stages
from uwrestore.synthetic import uieb_like_samples

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_stages")
out_dir.mkdir(parents=True, exist_ok=True)

label, degraded = uieb_like_samples(size=128, scenes=(("coffee", None),))[0]
degraded = quantize(degraded)
print(f"{label}: {degraded.shape[1]}x{degraded.shape[0]} px")
print("channel means of the degraded image:", np.round(degraded.reshape(-1, 3).mean(axis=0), 3))

result = restore_image(degraded)
stages = result.stages
print("after compensation:", np.round(stages["compensated"].reshape(-1, 3).mean(axis=0), 3))
print("after balancing:   ", np.round(stages["balanced"].reshape(-1, 3).mean(axis=0), 3))
print(f"illumination range [{stages['L'].min():.3f}, {stages['L'].max():.3f}]")
print(f"transmission range [{stages['t'].min():.3f}, {stages['t'].max():.3f}]")
print(f"solver iterations {result.iterations}, converged {result.converged}")

restored = quantize(result.image)
for name, img in (("degraded", degraded), ("restored", restored)):
    print(f"{name:9s} entropy {metrics.entropy(img):.3f}  UCIQE {metrics.uciqe(img):.3f}")

written = write_stages(stages, out_dir / "stages")
save_png(np.concatenate([degraded, restored], axis=1), out_dir / "panel.png")
print(f"\nwrote {len(written)} stage images and panel.png to {out_dir}")
