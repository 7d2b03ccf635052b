"""TiO feature extraction: pyramid -> channel split -> four descriptor families.

Column order is family-major, then level, then channel, then the
descriptor's own field order::

    bit      L0..L2 x R,G,B x 14   (126)
    haralick L0..L2 x R,G,B x 13   (117)
    glcm     L0..L2 x R,G,B x 6    ( 54)
    info     L0..L2 x RGB   x 6    ( 18)

Each family therefore occupies one contiguous slice, which is what the
descriptor-subset ablations select on.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from texpyr.bitdesc import BitFeatures, bit_block
from texpyr.cooccur import GlcmFeatures, HaralickFeatures, texture_features_gray
from texpyr.errors import ExtractionError, ImageTooSmall, TexpyrError
from texpyr.imagecore import check_raster, split_channels
from texpyr.infotheory import INFO_NAMES, info_block
from texpyr.pyramid import build_gaussian_pyramid, to_uint8

SCHEMA_VERSION = "tio-1"
FAMILIES = ("bit", "haralick", "glcm", "info")
CHANNELS = ("R", "G", "B")
MIN_SIDE = 8

_FIELD_NAMES = {
    "bit": tuple(BitFeatures.names()),
    "haralick": tuple(HaralickFeatures.names()),
    "glcm": tuple(GlcmFeatures.names()),
    "info": INFO_NAMES,
}


@dataclass(frozen=True)
class ExtractionConfig:
    glcm_levels: int = 8
    glcm_distance: int = 1
    pyramid_levels: int = 3
    schema_version: str = SCHEMA_VERSION


@dataclass(frozen=True)
class SchemaEntry:
    family: str
    level: int
    channel: str
    index: int
    name: str

    @property
    def column(self) -> str:
        return f"{self.family}_L{self.level}_{self.channel}_{self.name}"


@dataclass(frozen=True)
class FeatureSchema:
    entries: tuple[SchemaEntry, ...]
    version: str = SCHEMA_VERSION

    @property
    def total_dims(self) -> int:
        return len(self.entries)

    @property
    def columns(self) -> list[str]:
        return [e.column for e in self.entries]

    def family_slice(self, family: str) -> slice:
        idx = [k for k, e in enumerate(self.entries) if e.family == family]
        if not idx:
            raise KeyError(family)
        return slice(idx[0], idx[-1] + 1)

    def counts(self) -> dict[str, int]:
        out = dict.fromkeys(FAMILIES, 0)
        for e in self.entries:
            out[e.family] += 1
        return out

    def manifest(self) -> str:
        """Versioned text manifest: one ``position<TAB>column`` line per dimension."""
        lines = [f"# schema {self.version} dims={self.total_dims}"]
        lines += [f"{k}\t{c}" for k, c in enumerate(self.columns)]
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        return hashlib.sha256(self.manifest().encode()).hexdigest()[:16]


def block_channels(family: str) -> tuple[str, ...]:
    return ("RGB",) if family == "info" else CHANNELS


@lru_cache(maxsize=None)
def feature_schema(pyramid_levels: int = 3, version: str = SCHEMA_VERSION) -> FeatureSchema:
    entries = []
    for family in FAMILIES:
        for level in range(pyramid_levels):
            for channel in block_channels(family):
                for k, name in enumerate(_FIELD_NAMES[family]):
                    entries.append(SchemaEntry(family, level, channel, k, name))
    return FeatureSchema(entries=tuple(entries), version=version)


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    schema_version: str = SCHEMA_VERSION
    source_id: str = ""


def _pyramid_planes(img: np.ndarray, n_levels: int) -> list[tuple[np.ndarray, ...]]:
    """8-bit (R, G, B) planes for every pyramid level."""
    img = check_raster(img)
    h, w = img.shape[:2]
    if h < MIN_SIDE or w < MIN_SIDE:
        raise ImageTooSmall(f"images must be at least {MIN_SIDE}x{MIN_SIDE}, got {w}x{h}")
    # Split first, then reduce each plane in floating point; round once per level.
    per_channel = [
        build_gaussian_pyramid(ch.astype(np.float64), n_levels) for ch in split_channels(img)
    ]
    return [
        tuple(img[:, :, c] if level == 0 else to_uint8(per_channel[c][level]) for c in range(3))
        for level in range(n_levels)
    ]


def _block(planes, family: str, level: int, channel: str, config: ExtractionConfig) -> np.ndarray:
    r, g, b = planes[level]
    if family == "info":
        return info_block(r, g, b)
    plane = {"R": r, "G": g, "B": b}[channel]
    if family == "bit":
        return bit_block(plane).as_array()
    glcm, har = texture_features_gray(plane, config.glcm_levels, config.glcm_distance)
    return har.as_array() if family == "haralick" else glcm.as_array()


def extract_block(
    img: np.ndarray,
    family: str,
    level: int,
    channel: str,
    config: ExtractionConfig | None = None,
) -> np.ndarray:
    """Values of one (family, level, channel) block, in schema field order."""
    config = config or ExtractionConfig()
    if family not in FAMILIES:
        raise ValueError(f"unknown descriptor family {family!r}")
    if channel not in block_channels(family):
        raise ValueError(f"family {family!r} has no channel {channel!r}")
    if not 0 <= level < config.pyramid_levels:
        raise ValueError(f"level {level} outside 0..{config.pyramid_levels - 1}")
    planes = _pyramid_planes(img, config.pyramid_levels)
    return _block(planes, family, level, channel, config)


def extract_family(img: np.ndarray, family: str, config: ExtractionConfig | None = None) -> np.ndarray:
    """All levels and channels of one family, e.g. 126 BiT values."""
    config = config or ExtractionConfig()
    planes = _pyramid_planes(img, config.pyramid_levels)
    return np.concatenate(
        [
            _block(planes, family, level, ch, config)
            for level in range(config.pyramid_levels)
            for ch in block_channels(family)
        ]
    )


def extract_tio(
    img: np.ndarray, config: ExtractionConfig | None = None, source_id: str = ""
) -> FeatureVector:
    """The full concatenated descriptor (315 values for three levels)."""
    config = config or ExtractionConfig()
    try:
        planes = _pyramid_planes(img, config.pyramid_levels)
    except TexpyrError as exc:
        raise ExtractionError(str(exc), source_id=source_id) from exc
    parts = []
    for family in FAMILIES:
        for level in range(config.pyramid_levels):
            for ch in block_channels(family):
                try:
                    parts.append(_block(planes, family, level, ch, config))
                except (TexpyrError, ValueError, ArithmeticError) as exc:
                    raise ExtractionError(
                        f"{family} failed: {exc}", source_id=source_id, level=f"L{level}", channel=ch
                    ) from exc
    values = np.concatenate(parts)
    if not np.all(np.isfinite(values)):
        bad = feature_schema(config.pyramid_levels).columns[int(np.argmin(np.isfinite(values)))]
        raise ExtractionError(f"non-finite value in {bad}", source_id=source_id)
    return FeatureVector(values=values, schema_version=config.schema_version, source_id=source_id)


def pyramid_level_images(img: np.ndarray, n_levels: int = 3) -> list[np.ndarray]:
    """8-bit RGB image per pyramid level, as fed to the descriptors (for debug dumps)."""
    planes = _pyramid_planes(img, n_levels)
    return [np.stack(p, axis=2) for p in planes]
