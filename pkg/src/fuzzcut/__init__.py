"""Fuzzy segmentation of touching characters in binarized images."""

from fuzzcut.raster import BinaryPattern, GrayImage, binarize, otsu_threshold, trim
from fuzzcut.features import ColumnFeatures, extract
from fuzzcut.fis import FuzzySystemConfig, builtin_profile, evaluate
from fuzzcut.segmenter import CutResult, best_cut, segment

__all__ = [
    "BinaryPattern",
    "ColumnFeatures",
    "CutResult",
    "FuzzySystemConfig",
    "GrayImage",
    "best_cut",
    "binarize",
    "builtin_profile",
    "evaluate",
    "extract",
    "otsu_threshold",
    "segment",
    "trim",
]

__version__ = "0.1.0"
