"""Pseudo-lesion synthesis by seeded random walk, plus test phantoms.

All randomness flows from a single 64-bit seed through a counter-based
Philox generator (numpy.random.Philox), so every operation here is a pure
function of its inputs and reruns are bitwise reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import Geometry, Mask3D, Volume3D
from .errors import EmptyMask, SeedOutsideLung

FACE6 = tuple(
    (dz, dy, dx)
    for dz, dy, dx in [(-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, -1), (0, 0, 1)]
)
VERTEX26 = tuple(
    (dz, dy, dx)
    for dz in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dx in (-1, 0, 1)
    if (dz, dy, dx) != (0, 0, 0)
)

_OFFSETS = {"face6": FACE6, "vertex26": VERTEX26}


def connectivity_offsets(connectivity: str) -> tuple:
    if connectivity not in _OFFSETS:
        raise ValueError(f"connectivity must be face6 or vertex26, got {connectivity}")
    return _OFFSETS[connectivity]


def make_rng(seed: int) -> np.random.Generator:
    """Philox-backed generator; counter-based so streams are reproducible."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class LesionSynthesisParams:
    """Configuration of pseudo-lesion generation.

    Lesion HU values are drawn uniformly from `hu_range`, default
    (-650, -180) HU which mimics ground-glass opacity and consolidation
    attenuation.
    """

    num_lesions: tuple[int, int] = (1, 5)
    steps: tuple[int, int] = (500, 20000)
    hu_range: tuple[float, float] = (-650.0, -180.0)
    connectivity: str = "face6"
    rng_seed: int = 0
    smooth_radius: int = 0  # optional box blur of lesion HU; 0 disables

    def __post_init__(self):
        k_min, k_max = self.num_lesions
        n_min, n_max = self.steps
        if k_min < 1 or k_max < k_min:
            raise ValueError(f"num_lesions range invalid: {self.num_lesions}")
        if n_min < 0 or n_max < n_min:
            raise ValueError(f"steps range invalid: {self.steps}")
        if not self.hu_range[0] < self.hu_range[1]:
            raise ValueError(f"hu_range low must be < high: {self.hu_range}")
        connectivity_offsets(self.connectivity)


@dataclass
class SynthesisResult:
    synthetic_ct: Volume3D
    lesion_mask: Mask3D
    healthy_mask: Mask3D
    lesion_count: int
    seeds: list[tuple[int, int, int]]


def boundary_voxels(mask: Mask3D, connectivity: str = "face6") -> np.ndarray:
    """Set voxels with at least one unset or out-of-volume neighbor.

    Returns an (n, 3) int array of (z, y, x) indices in ascending order.
    The volume border counts as outside, so voxels on the edge of the grid
    are always boundary.
    """
    if mask.empty:
        raise EmptyMask("boundary_voxels: mask has no set voxels")
    offsets = connectivity_offsets(connectivity)
    padded = np.pad(mask.bits, 1)
    interior = np.ones_like(mask.bits)
    nz, ny, nx = mask.bits.shape
    for dz, dy, dx in offsets:
        interior &= padded[1 + dz : 1 + dz + nz, 1 + dy : 1 + dy + ny, 1 + dx : 1 + dx + nx]
    return np.argwhere(mask.bits & ~interior)


def grow_lesion(
    lung: Mask3D,
    seed: tuple[int, int, int],
    steps: int,
    connectivity: str = "face6",
    rng: np.random.Generator | None = None,
) -> Mask3D:
    """Grow one lesion from `seed` by a frontier-uniform random walk.

    Each step picks a random owned voxel and a random neighbor direction;
    the neighbor joins the lesion if it lies inside the lung and is not
    already owned.  The result is connected, contains the seed, and has at
    most steps + 1 voxels.  Steps count attempts, not accepted voxels.
    """
    if rng is None:
        rng = make_rng(0)
    if steps < 0:
        raise ValueError("steps must be >= 0")
    seed = tuple(int(c) for c in seed)
    if not lung.bits[seed]:
        raise SeedOutsideLung(f"seed {seed} not inside the lung mask")
    offsets = connectivity_offsets(connectivity)
    n_off = len(offsets)
    nz, ny, nx = lung.bits.shape

    owned = np.zeros_like(lung.bits)
    owned[seed] = True
    voxels = [seed]

    # Draw all indices up front: one owned-voxel pick and one direction per step.
    if steps > 0:
        picks = rng.integers(0, np.iinfo(np.int64).max, size=steps)
        dirs = rng.integers(0, n_off, size=steps)
        for i in range(steps):
            vz, vy, vx = voxels[picks[i] % len(voxels)]
            dz, dy, dx = offsets[dirs[i]]
            uz, uy, ux = vz + dz, vy + dy, vx + dx
            if 0 <= uz < nz and 0 <= uy < ny and 0 <= ux < nx:
                if lung.bits[uz, uy, ux] and not owned[uz, uy, ux]:
                    owned[uz, uy, ux] = True
                    voxels.append((uz, uy, ux))
    return Mask3D(geometry=lung.geometry, bits=owned)


def synthesize(ct: Volume3D, lung: Mask3D, params: LesionSynthesisParams) -> SynthesisResult:
    """Grow pseudo-lesions inside the lung and assign them random HU values.

    Deterministic in params.rng_seed: the lesion count, seed sites, step
    budgets, walk and HU draws all derive from one Philox stream.
    """
    ct.geometry.require_compatible(lung.geometry)
    if lung.empty:
        raise EmptyMask("synthesize: lung mask is empty")

    rng = make_rng(params.rng_seed)
    k_min, k_max = params.num_lesions
    n_min, n_max = params.steps
    k = int(rng.integers(k_min, k_max + 1))

    border = boundary_voxels(lung, params.connectivity)
    replace = len(border) < k
    seed_rows = rng.choice(len(border), size=k, replace=replace)

    lesion_bits = np.zeros_like(lung.bits)
    seeds = []
    for row in seed_rows:
        seed = tuple(int(c) for c in border[row])
        seeds.append(seed)
        budget = int(rng.integers(n_min, n_max + 1))
        lesion = grow_lesion(lung, seed, budget, params.connectivity, rng)
        lesion_bits |= lesion.bits

    values = np.array(ct.values)
    lo, hi = params.hu_range
    n_lesion = int(lesion_bits.sum())
    values[lesion_bits] = rng.uniform(lo, hi, size=n_lesion)
    if params.smooth_radius > 0:
        size = 2 * params.smooth_radius + 1
        blurred = ndimage.uniform_filter(values, size=size, mode="nearest")
        values[lesion_bits] = np.clip(blurred[lesion_bits], lo, hi)

    lesion_mask = Mask3D(geometry=lung.geometry, bits=lesion_bits)
    healthy_mask = Mask3D(geometry=lung.geometry, bits=lung.bits & ~lesion_bits)
    return SynthesisResult(
        synthetic_ct=Volume3D(geometry=ct.geometry, values=values),
        lesion_mask=lesion_mask,
        healthy_mask=healthy_mask,
        lesion_count=k,
        seeds=seeds,
    )


@dataclass
class PhantomSpec:
    """Synthetic test volume: a lung-shaped air region inside solid tissue."""

    dims: tuple[int, int, int] = (64, 64, 64)
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)
    lung_shape: str = "box"  # box | ellipsoid_pair
    air_mean: float = -900.0
    air_sd: float = 20.0
    wall_hu: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.air_sd <= 0:
            raise ValueError("air_sd must be > 0")
        if self.lung_shape not in ("box", "ellipsoid_pair"):
            raise ValueError(f"unknown lung_shape {self.lung_shape}")


def make_phantom(spec: PhantomSpec) -> tuple[Volume3D, Mask3D]:
    """Build a phantom CT and its exact lung mask.

    Lung-interior voxels are i.i.d. Normal(air_mean, air_sd^2); everything
    else sits at wall_hu.  The lung stays strictly inside the volume border.
    """
    geometry = Geometry(dims=spec.dims, spacing=spec.spacing)
    nx, ny, nz = spec.dims
    lung = np.zeros((nz, ny, nx), dtype=bool)

    if spec.lung_shape == "box":
        # Centered box with half the extent along each axis.
        sx, sy, sz = nx // 2, ny // 2, nz // 2
        x0, y0, z0 = (nx - sx) // 2, (ny - sy) // 2, (nz - sz) // 2
        lung[z0 : z0 + sz, y0 : y0 + sy, x0 : x0 + sx] = True
    else:
        z, y, x = np.mgrid[0:nz, 0:ny, 0:nx]
        for cx in (nx * 0.28, nx * 0.72):
            r = (
                ((x - cx) / (nx * 0.16)) ** 2
                + ((y - ny / 2) / (ny * 0.30)) ** 2
                + ((z - nz / 2) / (nz * 0.36)) ** 2
            )
            lung |= r < 1.0

    rng = make_rng(spec.rng_seed)
    values = np.full((nz, ny, nx), float(spec.wall_hu))
    values[lung] = rng.normal(spec.air_mean, spec.air_sd, size=int(lung.sum()))
    return Volume3D(geometry=geometry, values=values), Mask3D(geometry=geometry, bits=lung)
