"""Cross-correlation between monthly series.

Both series are z-normalized over their non-null entries; the correlation at
lag l averages products a'_t * b'_{t+l} over the valid overlap, so a
negative peak lag means the second series leads the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


from .graph import UndefinedMetricError


@dataclass
class TimeSeries:
    """Per-month values aligned to 1-based month indices; missing months are
    explicit None entries."""

    values: list[float | None]

    def __len__(self) -> int:
        return len(self.values)

    def count_valid(self) -> int:
        return sum(1 for v in self.values if v is not None)

    def znormalized(self) -> list[float | None]:
        xs = [v for v in self.values if v is not None]
        if not xs:
            raise UndefinedMetricError("series has no values")
        mean = sum(xs) / len(xs)
        var = sum((x - mean) ** 2 for x in xs) / len(xs)
        if var == 0.0:
            raise UndefinedMetricError("constant series has undefined correlation")
        std = math.sqrt(var)
        return [None if v is None else (v - mean) / std for v in self.values]


@dataclass
class CCFResult:
    lags: list[int]
    values: list[float]
    peak_lag: int

    def value_at(self, lag: int) -> float:
        return self.values[self.lags.index(lag)]


def cross_correlation(a: TimeSeries, b: TimeSeries, max_lag: int) -> CCFResult:
    """Correlation of a_t with b_{t+l} for l in [-max_lag, max_lag].

    Peak lag is the argmax; ties prefer smaller |l|, then the negative lag.
    """
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    for name, s in (("first", a), ("second", b)):
        if s.count_valid() < max_lag + 3:
            raise ValueError(
                f"{name} series too short: {s.count_valid()} values for max_lag={max_lag}"
            )
    az = a.znormalized()
    bz = b.znormalized()
    n = max(len(az), len(bz))
    values: dict[int, float] = {}
    for lag in range(-max_lag, max_lag + 1):
        total = 0.0
        pairs = 0
        for t in range(n):
            u = t + lag
            if 0 <= t < len(az) and 0 <= u < len(bz):
                x, y = az[t], bz[u]
                if x is not None and y is not None:
                    total += x * y
                    pairs += 1
        if pairs == 0:
            raise ValueError(f"no overlapping observations at lag {lag}")
        values[lag] = total / pairs

    peak = 0
    best = -math.inf
    for lag in sorted(values, key=lambda l: (abs(l), l)):
        if values[lag] > best:
            best = values[lag]
            peak = lag
    lags = list(range(-max_lag, max_lag + 1))
    return CCFResult(lags, [values[l] for l in lags], peak)


def series_from_rows(rows: Sequence[tuple[int, float | None]], months: int) -> TimeSeries:
    """Build a month-aligned series from (month, value) rows; absent months
    become None."""
    vals: list[float | None] = [None] * months
    for month, value in rows:
        if not 1 <= month <= months:
            raise ValueError(f"month {month} outside 1..{months}")
        vals[month - 1] = value
    return TimeSeries(vals)
