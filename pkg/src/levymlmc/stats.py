"""Monte Carlo aggregation: mergeable summaries, distribution distances and
count diagnostics.

Accumulators are designed for parallel reduction: each worker fills one,
results merge associatively (moments agree to roundoff whatever the merge
order).  The rate statistic of record is the median of |u * U_1|, not the
mean: several of the limit laws are stable with infinite variance, so
medians are the quantity that stays well-behaved.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.stats import chi2

ECDF_CAP = 10**6


@dataclass(frozen=True)
class SampleSummary:
    """Moment and quantile summary of one scalar sample."""

    count: int
    mean: float
    variance: float
    skewness: float
    quantiles: Tuple[Tuple[float, float], ...]
    ecdf: np.ndarray  # sorted retained sample (capped)


@dataclass(frozen=True)
class RateFit:
    """Log-log least-squares fit of a statistic against the level n."""

    levels: Tuple[int, ...]
    statistics: Tuple[float, ...]
    slope: float
    intercept: float
    r_squared: float


class SummaryAccumulator:
    """Streaming moments plus a capped retained sample.

    Moments merge by the pairwise update formulas; the retained sample is
    truncated by deterministic decimation once it exceeds the cap (memory
    bound, only relevant far beyond desk scale).
    """

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0
        self.m3 = 0.0
        self._chunks: List[np.ndarray] = []
        self._retained = 0

    def add(self, values: np.ndarray) -> "SummaryAccumulator":
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            return self
        nb = values.size
        mb = float(values.mean())
        d = values - mb
        m2b = float(np.sum(d * d))
        m3b = float(np.sum(d * d * d))
        self._merge_moments(nb, mb, m2b, m3b)
        self._append(values)
        return self

    def merge(self, other: "SummaryAccumulator") -> "SummaryAccumulator":
        if other.count:
            self._merge_moments(other.count, other.mean, other.m2, other.m3)
            for chunk in other._chunks:
                self._append(chunk)
        return self

    def _merge_moments(self, nb, mb, m2b, m3b):
        na, ma = self.count, self.mean
        n = na + nb
        delta = mb - ma
        self.mean = ma + delta * nb / n
        self.m3 = (
            self.m3
            + m3b
            + delta**3 * na * nb * (na - nb) / n**2
            + 3.0 * delta * (na * m2b - nb * self.m2) / n
        )
        self.m2 = self.m2 + m2b + delta**2 * na * nb / n
        self.count = n

    def _append(self, values):
        if self._retained >= ECDF_CAP:
            return
        take = min(values.size, ECDF_CAP - self._retained)
        self._chunks.append(values[:take].copy())
        self._retained += take

    def summary(self, qs: Sequence[float] = (0.05, 0.25, 0.5, 0.75, 0.95)) -> SampleSummary:
        if self.count == 0:
            raise ValueError("empty accumulator")
        sample = np.sort(np.concatenate(self._chunks)) if self._chunks else np.empty(0)
        variance = self.m2 / self.count
        if variance > 0:
            skew = (self.m3 / self.count) / variance**1.5
        else:
            skew = 0.0
        quants = tuple((float(q), float(np.quantile(sample, q))) for q in qs)
        return SampleSummary(
            count=self.count,
            mean=self.mean,
            variance=variance,
            skewness=skew,
            quantiles=quants,
            ecdf=sample,
        )


def ks_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov sup-distance between empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("samples must be nonempty")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical(n: int, level: float = 0.01) -> float:
    """One-sample critical value c(level)/sqrt(n); use sqrt(2/n) scaling for
    equal-size two-sample tests."""
    coef = {0.10: 1.22, 0.05: 1.36, 0.01: 1.63}[level]
    return coef / math.sqrt(n)


def empirical_cf(sample: np.ndarray, u_grid: Sequence[float]) -> np.ndarray:
    """(1/N) sum exp(i u X_j) on the given u grid."""
    sample = np.asarray(sample, dtype=float).ravel()
    if sample.size == 0:
        raise ValueError("sample must be nonempty")
    u = np.asarray(u_grid, dtype=float)
    return np.exp(1j * u[:, None] * sample[None, :]).mean(axis=1)


def rate_fit(levels: Sequence[int], statistics: Sequence[float]) -> RateFit:
    """Least-squares slope of log(statistic) against log(n).

    A statistic normalized by the correct sharp rate fits slope ~ 0; the
    raw statistic fits the negated log-slope of the rate itself.
    """
    levels = tuple(int(n) for n in levels)
    statistics = tuple(float(s) for s in statistics)
    if len(levels) != len(statistics) or len(levels) < 2:
        raise ValueError("need at least two (level, statistic) pairs")
    if any(levels[i] >= levels[i + 1] for i in range(len(levels) - 1)):
        raise ValueError("levels must be strictly increasing")
    if any(s <= 0 for s in statistics):
        raise ValueError("statistics must be positive for a log-log fit")
    x = np.log(np.asarray(levels, dtype=float))
    y = np.log(np.asarray(statistics, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 if total == 0 else 1.0 - float(np.sum(resid**2)) / float(total)
    return RateFit(
        levels=levels,
        statistics=statistics,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
    )


def poisson_count_test(counts: np.ndarray, lam: float) -> float:
    """Chi-square goodness-of-fit p-value of cell counts against a Poisson
    law with known intensity, binned {0, 1, >=2} (the intensity per cell is
    small by construction)."""
    counts = np.asarray(counts).ravel()
    n = counts.size
    if n == 0:
        raise ValueError("no counts supplied")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if lam == 0.0:
        return 1.0 if np.all(counts == 0) else 0.0
    obs = np.array(
        [np.sum(counts == 0), np.sum(counts == 1), np.sum(counts >= 2)], dtype=float
    )
    p0 = math.exp(-lam)
    probs = np.array([p0, lam * p0, 1.0 - p0 - lam * p0])
    exp_counts = n * probs
    # merge the >=2 bin into the 1 bin when too thin for the chi-square
    if exp_counts[2] < 5.0:
        obs = np.array([obs[0], obs[1] + obs[2]])
        exp_counts = np.array([exp_counts[0], exp_counts[1] + exp_counts[2]])
    stat = float(np.sum((obs - exp_counts) ** 2 / exp_counts))
    dof = len(obs) - 1
    return float(chi2.sf(stat, dof))
