"""Gaussian and Laplacian pyramids with the 5-tap binomial generating kernel.

Borders are mirrored without repeating the edge sample (numpy's
``reflect`` padding). Reduction keeps the samples at even coordinates, so
a level of size ``n`` becomes ``ceil(n / 2)``. Arrays may be 2-D or
``(H, W, C)``; channels are filtered independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from texpyr.errors import ImageTooSmall, InvalidTargetSize

BINOMIAL_5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
BINOMIAL_5_EXACT = tuple(Fraction(k, 16) for k in (1, 4, 6, 4, 1))


def generating_kernel() -> np.ndarray:
    """The separable 5x5 kernel ``w(m, n)``: outer product of [1, 4, 6, 4, 1] / 16."""
    return np.outer(BINOMIAL_5, BINOMIAL_5)


def _filter_axis(arr: np.ndarray, axis: int, taps: np.ndarray) -> np.ndarray:
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (2, 2)
    padded = np.pad(arr, pad, mode="reflect")
    n = arr.shape[axis]
    out = np.zeros(arr.shape, dtype=np.float64)
    for k, t in enumerate(taps):
        if t == 0.0:
            continue
        out += t * np.take(padded, np.arange(k, k + n), axis=axis)
    return out


def _smooth(arr: np.ndarray, taps: np.ndarray) -> np.ndarray:
    return _filter_axis(_filter_axis(arr, 0, taps), 1, taps)


def gaussian_reduce(img: np.ndarray) -> np.ndarray:
    """Blur with the generating kernel and keep every second row and column.

    Float input gives float output. Integer input is rounded and clamped
    back to its own dtype range.
    """
    img = np.asarray(img)
    h, w = img.shape[:2]
    if h < 2 or w < 2:
        raise ImageTooSmall(f"gaussian_reduce needs at least 2x2, got {w}x{h}")
    out = _smooth(img.astype(np.float64), BINOMIAL_5)[::2, ::2]
    if np.issubdtype(img.dtype, np.integer):
        info = np.iinfo(img.dtype)
        out = np.clip(np.rint(out), info.min, info.max).astype(img.dtype)
    return out


def expand(img: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Zero-interleave to ``(target_h, target_w)`` and smooth with ``4 * w``.

    Each target dimension must be ``2n - 1`` or ``2n`` for a source
    dimension ``n``. Always returns float64.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    if target_h not in (2 * h - 1, 2 * h) or target_w not in (2 * w - 1, 2 * w):
        raise InvalidTargetSize(
            f"cannot expand {w}x{h} to {target_w}x{target_h}; each axis must be 2n-1 or 2n"
        )
    if target_h < 2 or target_w < 2:
        raise InvalidTargetSize(f"target {target_w}x{target_h} is below the 2-sample minimum")
    up = np.zeros((target_h, target_w) + img.shape[2:], dtype=np.float64)
    up[::2, ::2] = img
    # 2 per axis restores unit gain on the half-populated grid.
    return _smooth(up, 2.0 * BINOMIAL_5)


def pyramid_dims(width: int, height: int, n_levels: int) -> list[tuple[int, int]]:
    dims = [(width, height)]
    for _ in range(n_levels - 1):
        w, h = dims[-1]
        dims.append(((w + 1) // 2, (h + 1) // 2))
    return dims


def build_gaussian_pyramid(img: np.ndarray, n_levels: int) -> list[np.ndarray]:
    """Return ``[img, reduce(img), reduce(reduce(img)), ...]`` with ``n_levels`` entries.

    Level 0 is the input object itself. Intermediate levels keep the input
    dtype semantics of :func:`gaussian_reduce`; pass float input to keep
    full precision through the recursion.
    """
    if n_levels < 1:
        raise ValueError(f"n_levels must be >= 1, got {n_levels}")
    img = np.asarray(img)
    h, w = img.shape[:2]
    need = 2 ** (n_levels - 1) * 2 if n_levels > 1 else 1
    if h < need or w < need:
        raise ImageTooSmall(f"{n_levels} levels need at least {need}x{need}, got {w}x{h}")
    levels = [img]
    for _ in range(n_levels - 1):
        levels.append(gaussian_reduce(levels[-1]))
    return levels


@dataclass(frozen=True)
class LaplacianPyramid:
    bands: tuple[np.ndarray, ...]
    residual: np.ndarray

    def reconstruct(self) -> np.ndarray:
        out = np.asarray(self.residual, dtype=np.float64)
        for band in reversed(self.bands):
            h, w = band.shape[:2]
            out = band + expand(out, w, h)
        return out


def build_laplacian_pyramid(gp: list[np.ndarray]) -> LaplacianPyramid:
    """Band-pass levels ``gp[k] - expand(gp[k+1])`` plus the coarsest Gaussian level."""
    if len(gp) < 2:
        raise ValueError("a Laplacian pyramid needs at least two Gaussian levels")
    bands = []
    for fine, coarse in zip(gp[:-1], gp[1:]):
        h, w = fine.shape[:2]
        bands.append(np.asarray(fine, dtype=np.float64) - expand(coarse, w, h))
    return LaplacianPyramid(bands=tuple(bands), residual=np.asarray(gp[-1], dtype=np.float64))


def to_uint8(level: np.ndarray) -> np.ndarray:
    """Round and clamp a float level to 8-bit for the discrete descriptors."""
    return np.clip(np.rint(level), 0, 255).astype(np.uint8)
