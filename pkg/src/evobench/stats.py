"""Descriptive statistics, Mann-Whitney U and least-squares polynomial fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtr
from scipy.stats import rankdata


@dataclass(frozen=True)
class Summary:
    n: int
    mean: float
    median: float
    min: float
    max: float
    q1: float
    q3: float


@dataclass(frozen=True)
class FitResult:
    degree: int
    coefficients: tuple[float, ...]  # highest degree first
    rmse: float

    def __call__(self, x):
        return np.polyval(self.coefficients, x)


def _median_sorted(xs: np.ndarray) -> float:
    m = len(xs)
    mid = m // 2
    if m % 2:
        return float(xs[mid])
    return float((xs[mid - 1] + xs[mid]) / 2)


def descriptive_summary(values: Sequence[float]) -> Summary:
    """Mean, median, extremes and quartiles.

    Quartiles are the medians of the lower and upper halves; for odd sizes the
    overall median belongs to neither half.  A single value is its own
    quartiles.
    """
    xs = np.sort(np.asarray(values, dtype=float))
    n = len(xs)
    if n == 0:
        raise ValueError("descriptive_summary needs at least one value")
    if n == 1:
        v = float(xs[0])
        return Summary(1, v, v, v, v, v, v)
    half = n // 2
    lower, upper = xs[:half], xs[n - half:]
    return Summary(
        n=n,
        mean=float(xs.mean()),
        median=_median_sorted(xs),
        min=float(xs[0]),
        max=float(xs[-1]),
        q1=_median_sorted(lower),
        q3=_median_sorted(upper),
    )


def half_means(values: Sequence[float]) -> tuple[float, float]:
    """Means of the lower and upper floor(n/2) sorted values."""
    xs = np.sort(np.asarray(values, dtype=float))
    if len(xs) < 2:
        raise ValueError("half_means needs at least two values")
    half = len(xs) // 2
    return float(xs[:half].mean()), float(xs[-half:].mean())


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sided Mann-Whitney U test by normal approximation.

    Returns ``(U_a, p)``.  Ranks use midranks for ties; the variance carries
    the usual tie correction and the z statistic a 0.5 continuity
    correction.  When every observation is tied the test is undefined and
    ``p = 1`` is returned.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = len(a), len(b)
    if na == 0 or nb == 0:
        raise ValueError("mann_whitney_u needs two non-empty samples")
    ranks = rankdata(np.concatenate([a, b]))
    u_a = float(ranks[:na].sum() - na * (na + 1) / 2)
    n = na + nb
    _, counts = np.unique(ranks, return_counts=True)
    ties = float(np.sum(counts.astype(float) ** 3 - counts))
    var = na * nb / 12.0 * ((n + 1) - ties / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return u_a, 1.0
    mean = na * nb / 2.0
    diff = abs(u_a - mean)
    z = max(diff - 0.5, 0.0) / math.sqrt(var)
    p = float(min(1.0, 2.0 * ndtr(-z)))
    return u_a, p


def polyfit(points: Sequence[tuple[float, float]], degree: int) -> FitResult:
    """Least-squares polynomial through ``(x, y)`` points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be a sequence of (x, y) pairs")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if len(pts) < degree + 1:
        raise ValueError(f"need at least {degree + 1} points for degree {degree}")
    x, y = pts[:, 0], pts[:, 1]
    if degree > 0 and np.ptp(x) == 0:
        raise ValueError("x values are all identical")
    if len(np.unique(x)) < degree + 1:
        raise ValueError(f"need at least {degree + 1} distinct x values for degree {degree}")
    design = np.vander(x, degree + 1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = y - design @ coef
    rmse = float(np.sqrt(np.mean(residual**2)))
    return FitResult(degree, tuple(float(c) for c in coef), rmse)
