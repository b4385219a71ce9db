import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from retweetpol.graph import UndefinedMetricError
from retweetpol.timeseries import TimeSeries, cross_correlation, series_from_rows


def wiggly(n, seed=0):
    rng = np.random.default_rng(seed)
    return (np.cumsum(rng.random(n) - 0.3) + rng.random(n)).tolist()


class TestCrossCorrelation:
    def test_identity_peak_zero(self):
        a = TimeSeries(wiggly(40))
        r = cross_correlation(a, a, max_lag=5)
        assert r.peak_lag == 0
        assert r.value_at(0) == pytest.approx(1.0, abs=1e-9)

    def test_negated_series(self):
        vals = wiggly(30)
        r = cross_correlation(TimeSeries(vals), TimeSeries([-v for v in vals]), 4)
        assert r.value_at(0) == pytest.approx(-1.0, abs=1e-9)

    def test_leading_series_peaks_at_minus_one(self):
        # b_t = a_{t+1}: b leads a by one month (b has no value in month n)
        vals = wiggly(41, seed=3)
        a = TimeSeries(vals)
        b = TimeSeries(vals[1:] + [None])
        r = cross_correlation(a, b, max_lag=6)
        assert r.peak_lag == -1
        for lag in r.lags:
            assert r.value_at(lag) == pytest.approx(
                oracles.ccf_oracle(a.values, b.values, lag), abs=1e-12
            )

    def test_constant_series_rejected(self):
        with pytest.raises(UndefinedMetricError):
            cross_correlation(TimeSeries([5.0] * 20), TimeSeries(wiggly(20)), 3)

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            cross_correlation(TimeSeries(wiggly(5)), TimeSeries(wiggly(5)), 4)

    def test_nulls_excluded_from_windows(self):
        vals = wiggly(30, seed=9)
        a = TimeSeries(vals)
        with_hole = list(vals)
        with_hole[10] = None
        b = TimeSeries(with_hole)
        r = cross_correlation(a, b, max_lag=3)
        assert r.peak_lag == 0
        for lag in r.lags:
            assert r.value_at(lag) == pytest.approx(
                oracles.ccf_oracle(a.values, b.values, lag), abs=1e-12
            )

    @given(st.integers(0, 2000))
    @settings(max_examples=20, deadline=None)
    def test_swap_antisymmetry(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(12, 40))
        a = TimeSeries((rng.random(n) * 10).tolist())
        b = TimeSeries((rng.random(n) * 10).tolist())
        r_ab = cross_correlation(a, b, 4)
        r_ba = cross_correlation(b, a, 4)
        for lag in r_ab.lags:
            assert r_ab.value_at(lag) == pytest.approx(r_ba.value_at(-lag), abs=1e-9)

    def test_lag_zero_bounded(self):
        rng = np.random.default_rng(4)
        a = TimeSeries((rng.random(50)).tolist())
        b = TimeSeries((rng.random(50)).tolist())
        r = cross_correlation(a, b, 0)
        assert -1.0 - 1e-9 <= r.value_at(0) <= 1.0 + 1e-9

    def test_tie_prefers_smaller_then_negative_lag(self):
        # period-2 series: correlation at lags -2, 0, 2 all equal 1
        vals = [1.0, 5.0] * 12
        r = cross_correlation(TimeSeries(vals), TimeSeries(vals), 2)
        assert r.peak_lag == 0


class TestSeriesFromRows:
    def test_missing_months_become_none(self):
        ts = series_from_rows([(1, 3.0), (3, 4.0)], months=4)
        assert ts.values == [3.0, None, 4.0, None]

    def test_out_of_range_month_rejected(self):
        with pytest.raises(ValueError):
            series_from_rows([(9, 1.0)], months=4)
