"""Gray-level co-occurrence matrices, GLCM properties and Haralick statistics.

Offsets are ``(dx, dy)`` in pixels: a pair is the pixel at ``(row, col)``
and the one at ``(row + dy, col + dx)``. Gray levels index the matrix
directly, starting at 0.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from typing import Sequence

import numpy as np

from texpyr.errors import EmptyPairSet, NotNormalized, OffsetOutOfRange
from texpyr.imagecore import check_gray, quantize

DIRECTIONS = ((1, 0), (1, 1), (0, 1), (-1, 1))
LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class CooccurrenceMatrix:
    counts: np.ndarray
    offsets: tuple[tuple[int, int], ...]
    symmetric: bool
    normalized: bool

    @property
    def levels(self) -> int:
        return self.counts.shape[0]


@dataclass(frozen=True)
class GlcmFeatures:
    contrast: float
    dissimilarity: float
    homogeneity: float
    energy: float
    correlation: float
    asm: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class HaralickFeatures:
    asm: float
    contrast: float
    correlation: float
    sum_of_squares_variance: float
    inverse_difference_moment: float
    sum_average: float
    sum_variance: float
    sum_entropy: float
    entropy: float
    difference_variance: float
    difference_entropy: float
    info_correlation_1: float
    info_correlation_2: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def _pair_slices(dx: int, dy: int, h: int, w: int):
    rows_a = slice(max(0, -dy), h - max(0, dy))
    cols_a = slice(max(0, -dx), w - max(0, dx))
    rows_b = slice(max(0, dy), h - max(0, -dy))
    cols_b = slice(max(0, dx), w - max(0, -dx))
    return (rows_a, cols_a), (rows_b, cols_b)


def compute_glcm(
    img: np.ndarray,
    levels: int,
    offsets: Sequence[tuple[int, int]] = ((1, 0),),
    symmetric: bool = True,
    normalize: bool = True,
) -> CooccurrenceMatrix:
    """Count gray-level pairs at each offset, summed into one ``levels x levels`` matrix."""
    img = check_gray(img)
    h, w = img.shape
    if img.size and int(img.max()) >= levels:
        raise ValueError(f"image holds gray level {int(img.max())} but levels={levels}")
    counts = np.zeros(levels * levels, dtype=np.int64)
    flat = img.astype(np.int64)
    for dx, dy in offsets:
        if dx == 0 and dy == 0:
            raise OffsetOutOfRange("offset (0, 0) pairs each pixel with itself")
        if abs(dx) >= w or abs(dy) >= h:
            raise EmptyPairSet(f"offset ({dx}, {dy}) leaves no pixel pairs in a {w}x{h} image")
        a, b = _pair_slices(dx, dy, h, w)
        counts += np.bincount((flat[a] * levels + flat[b]).ravel(), minlength=levels * levels)
    mat = counts.reshape(levels, levels)
    if symmetric:
        mat = mat + mat.T
    if normalize:
        mat = mat / mat.sum()
    return CooccurrenceMatrix(
        counts=mat, offsets=tuple(tuple(o) for o in offsets), symmetric=symmetric, normalized=normalize
    )


def _require_normalized(m: CooccurrenceMatrix) -> np.ndarray:
    p = np.asarray(m.counts, dtype=np.float64)
    if not m.normalized or abs(p.sum() - 1.0) > 1e-9:
        raise NotNormalized("features need a normalized co-occurrence matrix")
    return p


def _xlog2x(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=np.float64)
    return float(np.sum(p * np.log2(np.maximum(p, LOG_FLOOR))))


def _correlation(p: np.ndarray, i: np.ndarray, j: np.ndarray) -> float:
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    levels = np.arange(p.shape[0], dtype=np.float64)
    mu_i = float(levels @ px)
    mu_j = float(levels @ py)
    sd_i = np.sqrt(float(((levels - mu_i) ** 2) @ px))
    sd_j = np.sqrt(float(((levels - mu_j) ** 2) @ py))
    if sd_i * sd_j == 0.0:
        # constant texture: perfectly correlated with itself
        return 1.0
    r = float(np.sum(p * (i - mu_i) * (j - mu_j)) / (sd_i * sd_j))
    return float(np.clip(r, -1.0, 1.0))


def glcm_features(m: CooccurrenceMatrix) -> GlcmFeatures:
    p = _require_normalized(m)
    i, j = np.indices(p.shape, dtype=np.float64)
    diff = i - j
    asm = float(np.sum(p * p))
    return GlcmFeatures(
        contrast=float(np.sum(p * diff**2)),
        dissimilarity=float(np.sum(p * np.abs(diff))),
        homogeneity=float(np.sum(p / (1.0 + diff**2))),
        energy=float(np.sqrt(asm)),
        correlation=_correlation(p, i, j),
        asm=asm,
    )


def haralick_features(m: CooccurrenceMatrix) -> HaralickFeatures:
    """The 13 classic Haralick statistics; entropies in bits."""
    p = _require_normalized(m)
    g = p.shape[0]
    i, j = np.indices(p.shape, dtype=np.float64)
    levels = np.arange(g, dtype=np.float64)
    px = p.sum(axis=1)
    py = p.sum(axis=0)

    ii, jj = np.indices(p.shape)
    p_sum = np.bincount((ii + jj).ravel(), weights=p.ravel(), minlength=2 * g - 1)
    p_diff = np.bincount(np.abs(ii - jj).ravel(), weights=p.ravel(), minlength=g)
    k_sum = np.arange(2 * g - 1, dtype=np.float64)
    k_diff = np.arange(g, dtype=np.float64)

    mu_x = float(levels @ px)
    sum_average = float(k_sum @ p_sum)
    diff_mean = float(k_diff @ p_diff)

    hxy = -_xlog2x(p)
    hx = -_xlog2x(px)
    hy = -_xlog2x(py)
    pxpy = np.outer(px, py)
    hxy1 = -float(np.sum(p * np.log2(np.maximum(pxpy, LOG_FLOOR))))
    hxy2 = -_xlog2x(pxpy)

    hmax = max(hx, hy)
    imc1 = (hxy - hxy1) / hmax if hmax > 0 else 0.0
    # base-2 entropies, so 2**(-2x) plays the role of exp(-2x) in nats
    imc2 = float(np.sqrt(max(0.0, 1.0 - 2.0 ** (-2.0 * (hxy2 - hxy)))))

    return HaralickFeatures(
        asm=float(np.sum(p * p)),
        contrast=float(k_diff**2 @ p_diff),
        correlation=_correlation(p, i, j),
        sum_of_squares_variance=float(np.sum(p * (i - mu_x) ** 2)),
        inverse_difference_moment=float(np.sum(p / (1.0 + (i - j) ** 2))),
        sum_average=sum_average,
        sum_variance=float(((k_sum - sum_average) ** 2) @ p_sum),
        sum_entropy=-_xlog2x(p_sum),
        entropy=hxy,
        difference_variance=float(((k_diff - diff_mean) ** 2) @ p_diff),
        difference_entropy=-_xlog2x(p_diff),
        info_correlation_1=float(imc1),
        info_correlation_2=min(imc2, 1.0),
    )


def texture_features_gray(
    img: np.ndarray, levels: int = 8, distance: int = 1
) -> tuple[GlcmFeatures, HaralickFeatures]:
    """Direction-averaged GLCM and Haralick features of an 8-bit gray image.

    One symmetric normalized matrix per direction (0, 45, 90, 135 degrees)
    at ``distance``; features are computed per matrix and then averaged.
    """
    q = quantize(check_gray(img), levels)
    glcm_rows, har_rows = [], []
    for dx, dy in DIRECTIONS:
        m = compute_glcm(q, levels, [(dx * distance, dy * distance)], symmetric=True, normalize=True)
        glcm_rows.append(glcm_features(m).as_array())
        har_rows.append(haralick_features(m).as_array())
    glcm_mean = np.mean(glcm_rows, axis=0)
    har_mean = np.mean(har_rows, axis=0)
    return GlcmFeatures(*map(float, glcm_mean)), HaralickFeatures(*map(float, har_mean))
