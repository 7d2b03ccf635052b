"""Synthetic colour textures for smoke tests and demos.

Each class is a noisy oriented grating with its own frequency, angle and
palette. Samples within a class vary in phase, contrast and noise.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from texpyr.imagecore import encode_png


def _class_params(c: int, rng: np.random.Generator) -> dict:
    return {
        "freq": 0.04 + 0.035 * (c % 5) + rng.uniform(0, 0.01),
        "angle": np.pi * ((c * 0.37) % 1.0),
        "tint": rng.uniform(0.35, 1.0, size=3),
        "noise": 10.0 + 6.0 * (c % 3),
    }


def texture_image(cls: int, sample: int, size: int = 64, seed: int = 0) -> np.ndarray:
    prm = _class_params(cls, np.random.default_rng([seed, cls]))
    rng = np.random.default_rng([seed, cls, sample + 1])
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    angle = prm["angle"] + rng.normal(0, 0.05)
    t = xx * np.cos(angle) + yy * np.sin(angle)
    wave = np.sin(2 * np.pi * prm["freq"] * t + rng.uniform(0, 2 * np.pi))
    base = 128 + (70 + rng.uniform(-10, 10)) * wave
    img = base[:, :, None] * prm["tint"][None, None, :]
    img = img + rng.normal(0, prm["noise"], size=img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def write_toy_corpus(root, n_classes: int = 3, per_class: int = 10, size: int = 64, seed: int = 0) -> Path:
    """Write ``root/class_XX/img_YYY.png`` and return ``root``."""
    root = Path(root)
    for c in range(n_classes):
        cdir = root / f"class_{c:02d}"
        cdir.mkdir(parents=True, exist_ok=True)
        for s in range(per_class):
            (cdir / f"img_{s:03d}.png").write_bytes(encode_png(texture_image(c, s, size, seed)))
    return root
