"""
Empirical CDF and percentile tools for sum-rate samples
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from tools.errors import DomainError


@dataclass(frozen=True)
class CdfPoint:
    rate: float
    cumulative_probability: float


def _sorted_samples(samples: Sequence[float]) -> np.ndarray:
    values = np.sort(np.asarray(samples, dtype=float).ravel())
    if values.size == 0:
        raise DomainError("need at least one sample")
    return values


def empirical_cdf(samples: Sequence[float]) -> List[CdfPoint]:
    """Step CDF: probability i/n after the i-th smallest sample"""
    values = _sorted_samples(samples)
    n = values.size
    return [CdfPoint(rate=float(rate), cumulative_probability=(i + 1) / n) for i, rate in enumerate(values)]


def cdf_frame(samples: Sequence[float]) -> pd.DataFrame:
    """CDF points as a table with columns rate_bpshz, cum_prob"""
    points = empirical_cdf(samples)
    return pd.DataFrame({
        "rate_bpshz": [point.rate for point in points],
        "cum_prob": [point.cumulative_probability for point in points],
    })


def percentile_rate(samples: Sequence[float], likelihood_percent: float) -> float:
    """
    x%-likely rate: the rate exceeded in at least x% of the samples

    Nearest-rank (100 - x)-th percentile, so the 95%-likely rate is the
    ceil(0.05 n)-th smallest sample and the 50%-likely rate is the median.
    """
    if not 0 < likelihood_percent < 100:
        raise DomainError(f"likelihood must lie strictly between 0 and 100, got {likelihood_percent}")
    values = _sorted_samples(samples)
    rank = max(1, math.ceil((100.0 - likelihood_percent) * values.size / 100.0))
    return float(values[rank - 1])


def summarize_rates(samples: Sequence[float]) -> Dict[str, float]:
    """95%-likely, 50%-likely and moment summary of one scheme's samples"""
    values = _sorted_samples(samples)
    return {
        "likely95": percentile_rate(values, 95),
        "likely50": percentile_rate(values, 50),
        "mean": float(np.mean(values)),
        "min": float(values[0]),
        "max": float(values[-1]),
        "count": int(values.size),
    }
