"""Pulmonary-air threshold estimation from the lung HU histogram.

The highest histogram peak is fitted to a Gaussian over its above-half-
maximum cap by a closed-form parabola fit in log-count space; the air
threshold is mu + 2.58 * sigma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Mask3D, Volume3D
from .errors import DegenerateHistogram, EmptyMask, NonConcaveFit

Z_FACTOR = 2.58  # one-sided tail quantile defining the air threshold


@dataclass
class HuHistogram:
    """Uniform-bin histogram of HU values inside the lung."""

    bin_width: float
    bin_edges: np.ndarray
    counts: np.ndarray
    total: int

    @property
    def bin_centers(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2.0


@dataclass
class PeakFit:
    """Gaussian fitted to the main histogram peak and the derived threshold."""

    mu: float
    sigma: float
    peak_bin_center: float
    fit_bin_count: int
    threshold: float

    def to_json(self) -> dict:
        return {
            "mu": self.mu,
            "sigma": self.sigma,
            "peak_bin_center": self.peak_bin_center,
            "fit_bin_count": self.fit_bin_count,
            "threshold": self.threshold,
        }


def lung_histogram(ct: Volume3D, lung: Mask3D, bin_width: float = 2.0) -> HuHistogram:
    """Histogram the HU values at lung voxels.

    Bin edges are anchored at integer multiples of bin_width so that 0 HU is
    always an edge; a value lying exactly on an edge falls into the higher bin.
    """
    ct.geometry.require_compatible(lung.geometry)
    if lung.empty:
        raise EmptyMask("lung_histogram: lung mask is empty")
    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")

    values = ct.values[lung.bits]
    idx = np.floor(values / bin_width).astype(np.int64)
    lo, hi = int(idx.min()), int(idx.max())
    counts = np.bincount(idx - lo, minlength=hi - lo + 1)
    edges = np.arange(lo, hi + 2, dtype=np.float64) * bin_width
    return HuHistogram(
        bin_width=float(bin_width),
        bin_edges=edges,
        counts=counts,
        total=int(values.size),
    )


def fit_peak(hist: HuHistogram) -> PeakFit:
    """Fit a Gaussian to the above-half-maximum cap of the highest peak.

    log(count) over the cap is fitted by a least-squares parabola; the
    vertex gives mu and the curvature gives sigma.  Ties in the peak bin go
    to the lower-HU bin; empty bins inside the cap are excluded from the
    fit (log 0 undefined).
    """
    counts = np.asarray(hist.counts, dtype=np.float64)
    if np.count_nonzero(counts) < 3:
        raise DegenerateHistogram("need at least 3 nonzero bins")

    peak = int(np.argmax(counts))  # argmax returns the first (lowest-HU) maximum
    half = counts[peak] / 2.0

    lo = peak
    while lo > 0 and counts[lo - 1] >= half:
        lo -= 1
    hi = peak
    while hi < len(counts) - 1 and counts[hi + 1] >= half:
        hi += 1

    centers = hist.bin_centers[lo : hi + 1]
    region = counts[lo : hi + 1]
    keep = region > 0
    centers, region = centers[keep], region[keep]
    if len(region) < 3:
        raise DegenerateHistogram(
            f"fit region has {len(region)} usable bins, need >= 3"
        )

    # Shift centers for conditioning; the vertex shifts back exactly.
    c0 = centers[peak - lo] if keep[peak - lo] else centers[len(centers) // 2]
    a, b, _ = np.polyfit(centers - c0, np.log(region), 2)
    if a >= -1e-12:  # flat or upward parabola: no usable curvature
        raise NonConcaveFit("fitted parabola is not concave; sigma undefined")

    mu = float(c0 - b / (2.0 * a))
    sigma = float(np.sqrt(-1.0 / (2.0 * a)))
    return PeakFit(
        mu=mu,
        sigma=sigma,
        peak_bin_center=float(hist.bin_centers[peak]),
        fit_bin_count=int(len(region)),
        threshold=mu + Z_FACTOR * sigma,
    )


def compute_air_mask(ct: Volume3D, lung: Mask3D, threshold: float) -> Mask3D:
    """Binary air mask: lung voxels whose HU is strictly below the threshold."""
    ct.geometry.require_compatible(lung.geometry)
    return Mask3D(geometry=lung.geometry, bits=lung.bits & (ct.values < threshold))
