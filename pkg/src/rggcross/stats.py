"""Empirical count laws and their distance to Poisson laws."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import stats as sps


@dataclass
class EmpiricalPmf:
    """Histogram of non-negative integer observations.

    Instances form a commutative monoid under ``+`` so that partial results
    from different workers merge in any order.
    """

    counts: Counter = field(default_factory=Counter)

    @classmethod
    def from_samples(cls, samples: Iterable[int]) -> "EmpiricalPmf":
        arr = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples)
        if arr.size and (arr.min() < 0 or not np.issubdtype(arr.dtype, np.integer)):
            raise ValueError("samples must be non-negative integers")
        values, freq = np.unique(arr, return_counts=True)
        return cls(Counter({int(v): int(f) for v, f in zip(values, freq)}))

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def support_max(self) -> int:
        return max(self.counts) if self.counts else 0

    def probabilities(self, k_max: int | None = None) -> np.ndarray:
        k_max = self.support_max if k_max is None else k_max
        p = np.zeros(k_max + 1)
        for k, n in self.counts.items():
            if k <= k_max:
                p[k] = n
        return p / self.total

    def mean(self) -> float:
        return sum(k * n for k, n in self.counts.items()) / self.total

    def __add__(self, other: "EmpiricalPmf") -> "EmpiricalPmf":
        return EmpiricalPmf(self.counts + other.counts)

    def as_dict(self) -> dict[str, int]:
        return {str(k): self.counts[k] for k in sorted(self.counts)}


def tail_cutoff(mean: float) -> int:
    return math.ceil(mean + 12.0 * math.sqrt(mean + 1.0) + 30.0)


def _poisson_table(pmf: EmpiricalPmf, mean: float):
    if mean < 0:
        raise ValueError("Poisson mean must be >= 0")
    if pmf.total == 0:
        raise ValueError("empty empirical distribution")
    k_max = max(tail_cutoff(mean), pmf.support_max)
    k = np.arange(k_max + 1)
    return k_max, pmf.probabilities(k_max), sps.poisson.pmf(k, mean)


def tv_distance_to_poisson(pmf: EmpiricalPmf, mean: float) -> float:
    """Total variation distance; the Poisson mass beyond the cutoff is added exactly."""
    k_max, p_hat, p = _poisson_table(pmf, mean)
    tail = float(sps.poisson.sf(k_max, mean))
    return 0.5 * (float(np.abs(p_hat - p).sum()) + tail)


def wasserstein1_counts(pmf: EmpiricalPmf, mean: float) -> float:
    """``sum_k |F_hat(k) - F(k)|``, i.e. the W1 distance on the integers."""
    k_max, p_hat, p = _poisson_table(pmf, mean)
    body = float(np.abs(np.cumsum(p_hat) - np.cumsum(p)).sum())
    # sum_{k > k_max} (1 - F(k)) = E[(X - k_max - 1)^+] for X ~ Poisson(mean)
    tail = mean * float(sps.poisson.sf(k_max, mean)) - (k_max + 1) * float(
        sps.poisson.sf(k_max + 1, mean)
    )
    return body + max(tail, 0.0)


def mean_ci(samples) -> tuple[float, float]:
    """Sample mean and a three-standard-error half width."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two samples")
    return float(x.mean()), 3.0 * float(x.std(ddof=1)) / math.sqrt(x.size)


def covariance_ci(x, y) -> tuple[float, float]:
    """Sample covariance of paired observations with a jackknife 3-SE half width."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("paired samples must be 1-D arrays of equal length")
    n = x.size
    if n < 2:
        raise ValueError("need at least two pairs")
    dx = x - x.mean()
    dy = y - y.mean()
    s_xy = float(dx @ dy)
    cov = s_xy / (n - 1)
    if n < 3:
        return cov, math.inf
    # leave-one-out covariances in closed form
    loo = (s_xy - n / (n - 1) * dx * dy) / (n - 2)
    var_jk = (n - 1) / n * float(np.sum((loo - loo.mean()) ** 2))
    return cov, 3.0 * math.sqrt(var_jk)
