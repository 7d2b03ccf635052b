"""Image decoding, channel handling and gray-level quantization.

Images are plain numpy arrays: a raster is ``(H, W, 3)`` uint8 and a gray
image is ``(H, W)`` uint8. Functions never mutate their inputs.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from texpyr.errors import (
    ChannelCountError,
    DecodeError,
    DimensionMismatch,
    EmptyImage,
    InvalidLevelCount,
    UnsupportedFormat,
)

SUPPORTED_FORMATS = ("PNG", "JPEG")

# BT.601 luma weights in thousandths, so the weighted sum stays integral.
_LUMA_WEIGHTS = (299, 587, 114)

# Pillow modes that decode to 8 bits per sample after conversion.
_EIGHT_BIT_MODES = {"1", "L", "LA", "P", "PA", "RGB", "RGBA", "RGBX", "CMYK", "YCbCr"}


def decode_image(data: bytes) -> np.ndarray:
    """Decode a PNG or JPEG byte stream into an ``(H, W, 3)`` uint8 raster.

    Grayscale files are replicated to three channels. Palette and alpha
    images are converted to RGB (alpha is dropped). 16-bit and float
    images are rejected rather than rescaled.
    """
    try:
        with Image.open(io.BytesIO(data)) as im:
            fmt = im.format
            if fmt not in SUPPORTED_FORMATS:
                raise UnsupportedFormat(f"unsupported image format {fmt!r}")
            if im.mode not in _EIGHT_BIT_MODES:
                raise UnsupportedFormat(f"only 8-bit images are supported, got mode {im.mode!r}")
            im.load()
            if im.mode in ("1", "L", "LA"):
                gray = np.asarray(im.convert("L"), dtype=np.uint8)
                arr = np.repeat(gray[:, :, None], 3, axis=2)
            else:
                arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except UnsupportedFormat:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc
    return np.ascontiguousarray(arr)


def read_image(path) -> np.ndarray:
    return decode_image(Path(path).read_bytes())


def encode_png(img: np.ndarray) -> bytes:
    """Encode a uint8 gray or RGB array as PNG (used for debug dumps and fixtures)."""
    buf = io.BytesIO()
    Image.fromarray(np.asarray(img, dtype=np.uint8)).save(buf, format="PNG")
    return buf.getvalue()


def check_raster(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ChannelCountError(f"expected an (H, W, 3) raster, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise EmptyImage("raster has no pixels")
    if img.dtype != np.uint8:
        raise UnsupportedFormat(f"expected uint8 samples, got {img.dtype}")
    return img


def check_gray(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ChannelCountError(f"expected a 2-D gray image, got shape {img.shape}")
    if img.size == 0:
        raise EmptyImage("gray image has no pixels")
    return img


def split_channels(img: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the R, G and B planes of a 3-channel raster as contiguous copies."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ChannelCountError(f"split_channels needs 3 channels, got shape {img.shape}")
    return tuple(np.ascontiguousarray(img[:, :, c]) for c in range(3))


def merge_channels(r: np.ndarray, g: np.ndarray, b: np.ndarray) -> np.ndarray:
    if not (r.shape == g.shape == b.shape):
        raise DimensionMismatch(f"channel shapes differ: {r.shape}, {g.shape}, {b.shape}")
    return np.stack([r, g, b], axis=2)


def to_grayscale(r: np.ndarray, g: np.ndarray, b: np.ndarray) -> np.ndarray:
    """BT.601 luma, rounded half-up and clamped to [0, 255]."""
    if not (r.shape == g.shape == b.shape):
        raise DimensionMismatch(f"channel shapes differ: {r.shape}, {g.shape}, {b.shape}")
    wr, wg, wb = _LUMA_WEIGHTS
    acc = wr * r.astype(np.int64) + wg * g.astype(np.int64) + wb * b.astype(np.int64)
    return np.clip((acc + 500) // 1000, 0, 255).astype(np.uint8)


def quantize(img: np.ndarray, levels: int) -> np.ndarray:
    """Map 8-bit values onto ``levels`` equal-width bins: ``floor(v * levels / 256)``."""
    if not isinstance(levels, (int, np.integer)) or not 2 <= levels <= 256:
        raise InvalidLevelCount(f"levels must be an integer in [2, 256], got {levels!r}")
    img = np.asarray(img)
    out = (img.astype(np.int64) * int(levels)) >> 8
    return out.astype(np.uint8)
