"""Multiscale texture descriptors and classifiers.

Each image is reduced to a three-level Gaussian pyramid. Four descriptor
families are measured on every colour channel of every level and
concatenated into a 315-value "TiO" vector.
"""

from texpyr.pipeline import ExtractionConfig, FeatureVector, extract_tio, feature_schema

__version__ = "0.1.0"

__all__ = ["ExtractionConfig", "FeatureVector", "extract_tio", "feature_schema", "__version__"]
