"""Shannon entropy and pairwise mutual information over 256-bin histograms (bits)."""

from __future__ import annotations

import numpy as np

from texpyr.errors import DimensionMismatch, EmptyImage

BINS = 256


def histogram256(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.size == 0:
        raise EmptyImage("cannot histogram an empty image")
    return np.bincount(img.ravel().astype(np.int64), minlength=BINS)


def joint_histogram(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise EmptyImage("cannot histogram an empty image")
    idx = a.ravel().astype(np.int64) * BINS + b.ravel().astype(np.int64)
    return np.bincount(idx, minlength=BINS * BINS).reshape(BINS, BINS)


def entropy_from_counts(counts: np.ndarray) -> float:
    counts = np.asarray(counts, dtype=np.float64).ravel()
    counts = counts[counts > 0]
    p = counts / counts.sum()
    return float(max(0.0, -np.sum(p * np.log2(p))))


def entropy(img: np.ndarray) -> float:
    return entropy_from_counts(histogram256(img))


def mutual_information(a: np.ndarray, b: np.ndarray) -> float:
    """``H(A) + H(B) - H(A, B)``, clamped at zero against rounding."""
    joint = joint_histogram(a, b)
    mi = (
        entropy_from_counts(joint.sum(axis=1))
        + entropy_from_counts(joint.sum(axis=0))
        - entropy_from_counts(joint)
    )
    return max(0.0, mi)


INFO_NAMES = ("H_R", "H_G", "H_B", "MI_RG", "MI_RB", "MI_GB")


def info_block(r: np.ndarray, g: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``[H(R), H(G), H(B), I(R;G), I(R;B), I(G;B)]``."""
    if not (np.shape(r) == np.shape(g) == np.shape(b)):
        raise DimensionMismatch("channel shapes differ")
    return np.array(
        [
            entropy(r),
            entropy(g),
            entropy(b),
            mutual_information(r, g),
            mutual_information(r, b),
            mutual_information(g, b),
        ],
        dtype=np.float64,
    )
