"""Decomposed stereo matching: dense matching at a fixed reference
resolution plus scale-by-scale sparse matching of detail pixels."""

from ._core import (
    detect_details,
    evaluate,
    exhaustive_total,
    generate_scene,
    gradcheck,
    match,
    read_pfm,
    write_pfm,
)

__all__ = [
    "detect_details",
    "evaluate",
    "exhaustive_total",
    "generate_scene",
    "gradcheck",
    "match",
    "read_pfm",
    "write_pfm",
]
