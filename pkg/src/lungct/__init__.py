"""Volumetric chest-CT toolkit: pseudo-lesion synthesis, air-mask thresholding,
mask combination, segmentation metrics and severity statistics."""

__version__ = "0.1.0"

from .core import Geometry, Volume3D, Mask3D
from . import volume_io, synth, airmask, maskops, metrics, stats

__all__ = [
    "Geometry",
    "Volume3D",
    "Mask3D",
    "volume_io",
    "synth",
    "airmask",
    "maskops",
    "metrics",
    "stats",
]
