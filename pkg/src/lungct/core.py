"""Core volumetric data structures.

Arrays are stored as numpy arrays of shape (nz, ny, nx) in C order, which is
exactly the x-fastest flat layout of a MetaImage raw file.  Geometry tuples
(dims, spacing, origin) are always ordered (x, y, z).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryMismatch


@dataclass(frozen=True)
class Geometry:
    """Physical grid of a volume: dims (nx, ny, nz), spacing in mm, origin in mm."""

    dims: tuple[int, int, int]
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        if len(self.dims) != 3 or any(d < 1 for d in self.dims):
            raise ValueError(f"dims must be three integers >= 1, got {self.dims}")
        if len(self.spacing) != 3 or any(s <= 0 for s in self.spacing):
            raise ValueError(f"spacing must be three positive reals, got {self.spacing}")

    @property
    def voxel_count(self) -> int:
        nx, ny, nz = self.dims
        return nx * ny * nz

    @property
    def shape_zyx(self) -> tuple[int, int, int]:
        nx, ny, nz = self.dims
        return (nz, ny, nx)

    def compatible(self, other: "Geometry") -> bool:
        """Grids match when dims and spacing agree; origin is ignored."""
        return self.dims == other.dims and self.spacing == other.spacing

    def require_compatible(self, other: "Geometry") -> None:
        if not self.compatible(other):
            raise GeometryMismatch(
                f"incompatible grids: dims {self.dims} vs {other.dims}, "
                f"spacing {self.spacing} vs {other.spacing}"
            )


@dataclass
class Volume3D:
    """Scalar CT field in Hounsfield units on a physical grid."""

    geometry: Geometry
    values: np.ndarray  # float array, shape (nz, ny, nx)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.size != self.geometry.voxel_count:
            raise ValueError(
                f"values size {arr.size} != voxel count {self.geometry.voxel_count}"
            )
        arr = arr.reshape(self.geometry.shape_zyx)
        if not np.all(np.isfinite(arr)):
            raise ValueError("volume contains non-finite values")
        arr.flags.writeable = False
        self.values = arr


@dataclass
class Mask3D:
    """Binary voxel set sharing a Volume3D grid."""

    geometry: Geometry
    bits: np.ndarray  # bool array, shape (nz, ny, nx)

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.size != self.geometry.voxel_count:
            raise ValueError(
                f"bits size {arr.size} != voxel count {self.geometry.voxel_count}"
            )
        if arr.dtype != np.bool_:
            uniq = np.unique(arr)
            if not np.all(np.isin(uniq, (0, 1))):
                raise ValueError("mask elements must be 0 or 1")
            arr = arr.astype(bool)
        arr = arr.reshape(self.geometry.shape_zyx)
        arr.flags.writeable = False
        self.bits = arr

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    @property
    def empty(self) -> bool:
        return not self.bits.any()

    def same_set(self, other: "Mask3D") -> bool:
        return self.geometry.compatible(other.geometry) and np.array_equal(
            self.bits, other.bits
        )
