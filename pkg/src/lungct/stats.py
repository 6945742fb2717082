"""Disease-severity scores and Pearson correlation against lab values.

DL (damage load) is the lesion-to-lung voxel ratio; DS (damage score) is
the median HU over the lesion region.  Correlations report two-sided
p-values from the Student t distribution via the regularized incomplete
beta function.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import Mask3D, Volume3D
from .errors import ConstantInput, EmptyMask, LengthMismatch, TooFewPoints

log = logging.getLogger(__name__)

SIGNIFICANCE_LEVEL = 0.05


@dataclass
class SeverityScores:
    dl: float  # lesion/lung volume ratio, dimensionless
    ds: float  # median lesion HU


@dataclass
class SubjectRecord:
    id: str
    wbc: float  # white blood cells, 1e9/L
    lym_pct: float  # percentage lymphocytes
    dl: float
    ds: float


@dataclass
class CorrelationResult:
    pair: tuple[str, str]  # (score name, lab name)
    n: int
    r: float
    p: float
    significant: bool
    error: str | None = None


def damage_load(lesion: Mask3D, lung: Mask3D) -> float:
    """Lesion volume as a fraction of lung volume (voxel counts; spacing
    cancels for compatible grids)."""
    lesion.geometry.require_compatible(lung.geometry)
    n_lung = lung.count
    if n_lung == 0:
        raise EmptyMask("damage_load: lung mask is empty")
    outside = int((lesion.bits & ~lung.bits).sum())
    if outside:
        log.warning("damage_load: %d lesion voxels outside the lung were ignored", outside)
    return int((lesion.bits & lung.bits).sum()) / n_lung


def damage_score(ct: Volume3D, lesion: Mask3D) -> float:
    """Median CT HU over lesion voxels (even counts average the middle two)."""
    ct.geometry.require_compatible(lesion.geometry)
    if lesion.empty:
        raise EmptyMask("damage_score: lesion mask is empty")
    return float(np.median(ct.values[lesion.bits]))


def severity(ct: Volume3D, lesion: Mask3D, lung: Mask3D) -> SeverityScores:
    return SeverityScores(
        dl=damage_load(lesion, lung),
        ds=damage_score(ct, lesion),
    )


def pearson(x, y, pair: tuple[str, str] = ("x", "y")) -> CorrelationResult:
    """Pearson r with a two-sided p-value.

    p comes from t = r * sqrt((n-2)/(1-r^2)) against Student's t with n-2
    degrees of freedom, evaluated as a regularized incomplete beta tail;
    |r| = 1 returns p = 0 exactly.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"input lengths differ: {x.shape} vs {y.shape}")
    n = len(x)
    if n < 3:
        raise TooFewPoints(f"need at least 3 points, got {n}")

    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ConstantInput("constant input; correlation undefined")
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))

    if abs(r) == 1.0:
        p = 0.0
    else:
        df = n - 2
        t2 = r * r * df / (1.0 - r * r)
        p = float(special.betainc(df / 2.0, 0.5, df / (df + t2)))
    return CorrelationResult(
        pair=pair, n=n, r=r, p=p, significant=p < SIGNIFICANCE_LEVEL
    )


_PAIRS = [("DL", "WBC"), ("DL", "LYM%"), ("DS", "WBC"), ("DS", "LYM%")]
_FIELDS = {"DL": "dl", "DS": "ds", "WBC": "wbc", "LYM%": "lym_pct"}


def correlate_table(records: list[SubjectRecord]) -> list[CorrelationResult]:
    """Correlate the two severity scores against the two lab values.

    Returns one result per pair in a fixed order.  Records missing a value
    for a pair are dropped pairwise (with a logged count); a pair whose
    correlation is undefined is reported with its error code instead of
    failing the others.
    """
    if len(records) < 3:
        raise TooFewPoints(f"need at least 3 records, got {len(records)}")
    results = []
    for score_name, lab_name in _PAIRS:
        xs, ys, dropped = [], [], 0
        for rec in records:
            xv = getattr(rec, _FIELDS[score_name])
            yv = getattr(rec, _FIELDS[lab_name])
            if xv is None or yv is None or not (np.isfinite(xv) and np.isfinite(yv)):
                dropped += 1
                continue
            xs.append(xv)
            ys.append(yv)
        if dropped:
            log.info("correlate_table: dropped %d incomplete records for %s vs %s",
                     dropped, score_name, lab_name)
        try:
            results.append(pearson(xs, ys, pair=(score_name, lab_name)))
        except (ConstantInput, TooFewPoints) as exc:
            results.append(
                CorrelationResult(
                    pair=(score_name, lab_name),
                    n=len(xs),
                    r=float("nan"),
                    p=float("nan"),
                    significant=False,
                    error=exc.code,
                )
            )
    return results
