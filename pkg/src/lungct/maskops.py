"""Boolean voxel-set algebra, mask combination, connected components."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import Geometry, Mask3D


@dataclass
class LabelMap:
    """Connected-component labeling; 0 is background, labels run 1..count."""

    geometry: Geometry
    labels: np.ndarray
    component_count: int


def combine_masks(m_lung: Mask3D, m_ht: Mask3D, m_a: Mask3D) -> Mask3D:
    """Lesion segmentation from the three masks: lung minus healthy tissue
    minus pulmonary air, as pure voxelwise boolean algebra."""
    m_lung.geometry.require_compatible(m_ht.geometry)
    m_lung.geometry.require_compatible(m_a.geometry)
    return Mask3D(
        geometry=m_lung.geometry,
        bits=m_lung.bits & ~m_ht.bits & ~m_a.bits,
    )


def boolean_op(a: Mask3D, b: Mask3D, op: str) -> Mask3D:
    a.geometry.require_compatible(b.geometry)
    if op == "and":
        bits = a.bits & b.bits
    elif op == "or":
        bits = a.bits | b.bits
    elif op == "and_not":
        bits = a.bits & ~b.bits
    elif op == "xor":
        bits = a.bits ^ b.bits
    else:
        raise ValueError(f"unknown boolean op {op!r}")
    return Mask3D(geometry=a.geometry, bits=bits)


def connected_components(mask: Mask3D, connectivity: str = "face6") -> LabelMap:
    """Label connected components, numbered by ascending minimum linear
    voxel index so the result is deterministic across platforms."""
    structure = ndimage.generate_binary_structure(3, 1 if connectivity == "face6" else 3)
    raw, n = ndimage.label(mask.bits, structure=structure)

    if n > 0:
        # Renumber by first occurrence in flat (z, y, x) scan order.
        flat = raw.ravel()
        first_seen = np.full(n + 1, flat.size, dtype=np.int64)
        nonzero = np.flatnonzero(flat)
        # reversed so earlier indices overwrite later ones
        first_seen[flat[nonzero[::-1]]] = nonzero[::-1]
        order = np.argsort(first_seen[1:], kind="stable")
        remap = np.zeros(n + 1, dtype=raw.dtype)
        remap[1 + order] = np.arange(1, n + 1)
        raw = remap[raw]

    return LabelMap(geometry=mask.geometry, labels=raw, component_count=int(n))
