"""Loading, return transforms and moment summaries."""

import math

import numpy as np
import pytest

from riskboot import (
    IngestError,
    PriceSeries,
    ReturnSeries,
    drop_zero_returns,
    load_prices,
    load_returns,
    log_returns,
    summary_stats,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoadPrices:
    def test_well_formed_file(self, tmp_path):
        path = write(tmp_path / "sp.csv",
                     "date,price\n2001-01-02,100.0\n2001-01-03,101.5\n2001-01-04,99.25\n")
        series = load_prices(path)
        assert series.label == "sp"
        assert series.n == 3
        assert series.prices.tolist() == [100.0, 101.5, 99.25]
        assert [d.isoformat() for d in series.dates] == ["2001-01-02", "2001-01-03", "2001-01-04"]

    def test_explicit_label_and_columns(self, tmp_path):
        path = write(tmp_path / "x.csv", "day,settle\n02/01/2001,5.0\n03/01/2001,6.0\n")
        series = load_prices(path, date_col="day", price_col="settle",
                             date_format="%d/%m/%Y", label="DAX")
        assert series.label == "DAX"
        assert series.prices.tolist() == [5.0, 6.0]

    def test_unordered_rows_are_sorted_by_date(self, tmp_path):
        path = write(tmp_path / "x.csv",
                     "date,price\n2001-01-04,3.0\n2001-01-02,1.0\n2001-01-03,2.0\n")
        series = load_prices(path)
        assert series.prices.tolist() == [1.0, 2.0, 3.0]
        assert series.dates == tuple(sorted(series.dates))

    def test_every_problem_reported_at_once(self, tmp_path):
        path = write(tmp_path / "bad.csv",
                     "date,price\n"
                     "2001-01-02,100.0\n"
                     "not-a-date,101.0\n"
                     "2001-01-04,zzz\n"
                     "2001-01-05,-3.0\n"
                     "2001-01-06,\n")
        with pytest.raises(IngestError) as excinfo:
            load_prices(path)
        problems = excinfo.value.problems
        assert len(problems) == 4
        text = str(excinfo.value)
        assert "line 3" in text and "not-a-date" in text
        assert "line 4" in text and "zzz" in text
        assert "line 5" in text and "not positive" in text
        assert "line 6" in text and "empty" in text

    def test_duplicate_dates_rejected(self, tmp_path):
        path = write(tmp_path / "dup.csv",
                     "date,price\n2001-01-02,1.0\n2001-01-02,2.0\n2001-01-03,3.0\n")
        with pytest.raises(IngestError, match="duplicate date 2001-01-02"):
            load_prices(path)

    def test_missing_column_lists_header(self, tmp_path):
        path = write(tmp_path / "x.csv", "date,px\n2001-01-02,1.0\n")
        with pytest.raises(IngestError, match="missing column 'price'"):
            load_prices(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestError, match="cannot open file"):
            load_prices(str(tmp_path / "nope.csv"))

    def test_empty_file(self, tmp_path):
        path = write(tmp_path / "empty.csv", "")
        with pytest.raises(IngestError, match="header"):
            load_prices(path)

    def test_single_price_is_not_enough(self, tmp_path):
        path = write(tmp_path / "one.csv", "date,price\n2001-01-02,1.0\n")
        with pytest.raises(IngestError, match="at least 2"):
            load_prices(path)

    def test_non_finite_price_rejected(self, tmp_path):
        path = write(tmp_path / "inf.csv",
                     "date,price\n2001-01-02,1.0\n2001-01-03,inf\n")
        with pytest.raises(IngestError, match="non-finite"):
            load_prices(path)


class TestLoadReturns:
    def test_returns_loaded_verbatim(self, tmp_path):
        path = write(tmp_path / "r.csv",
                     "date,return\n2001-01-02,0.01\n2001-01-03,-0.02\n")
        series = load_returns(path)
        assert series.returns.tolist() == [0.01, -0.02]

    def test_negative_returns_allowed_zero_rows_not(self, tmp_path):
        path = write(tmp_path / "r.csv", "date,return\n")
        with pytest.raises(IngestError, match="no usable return rows"):
            load_returns(path)


class TestSeriesContainers:
    def test_price_series_validation(self):
        import datetime
        d = [datetime.date(2001, 1, 2), datetime.date(2001, 1, 3)]
        with pytest.raises(ValueError, match="positive"):
            PriceSeries("x", d, np.array([1.0, -1.0]))
        with pytest.raises(ValueError, match="strictly increasing"):
            PriceSeries("x", d[::-1], np.array([1.0, 2.0]))
        with pytest.raises(ValueError, match="at least 2"):
            PriceSeries("x", d[:1], np.array([1.0]))

    def test_return_series_validation(self):
        import datetime
        d = [datetime.date(2001, 1, 2)]
        with pytest.raises(ValueError, match="finite"):
            ReturnSeries("x", d, np.array([np.nan]))
        with pytest.raises(ValueError, match="empty"):
            ReturnSeries("x", [], np.array([]))


class TestLogReturns:
    def test_single_step_value(self, tmp_path):
        """A 10% price rise gives ln(1.1)."""
        path = write(tmp_path / "p.csv",
                     "date,price\n2001-01-02,100.0\n2001-01-03,110.0\n")
        r = log_returns(load_prices(path))
        assert r.returns[0] == pytest.approx(0.09531017980432493, abs=1e-15)
        assert r.n == 1
        assert r.dates[0].isoformat() == "2001-01-03"

    def test_repeated_price_gives_exact_zero(self, tmp_path):
        """Holiday padding repeats the settlement price; the log return
        must come out exactly 0.0, not merely small."""
        path = write(tmp_path / "p.csv",
                     "date,price\n2001-01-02,96.37\n2001-01-03,96.37\n2001-01-04,97.0\n")
        r = log_returns(load_prices(path))
        assert r.returns[0] == 0.0

    def test_cumulative_sum_recovers_total_log_growth(self):
        import datetime
        rng = np.random.default_rng(42)
        prices = 100.0 * np.exp(np.cumsum(rng.normal(0.0, 0.02, 500)))
        dates = [datetime.date(2001, 1, 1) + datetime.timedelta(days=i)
                 for i in range(prices.size)]
        r = log_returns(PriceSeries("walk", dates, prices))
        recovered = np.cumsum(r.returns)
        expected = np.log(prices[1:] / prices[0])
        assert np.max(np.abs(recovered - expected)) <= 1e-12


class TestDropZeroReturns:
    def test_only_exact_zeros_dropped(self):
        import datetime
        dates = [datetime.date(2001, 1, 1) + datetime.timedelta(days=i) for i in range(4)]
        series = ReturnSeries("x", dates, np.array([0.01, 0.0, -1e-300, 0.0]))
        out = drop_zero_returns(series)
        assert out.returns.tolist() == [0.01, -1e-300]
        assert len(out.dates) == 2

    def test_all_zero_series_rejected(self):
        import datetime
        dates = [datetime.date(2001, 1, 1), datetime.date(2001, 1, 2)]
        with pytest.raises(ValueError, match="every return is zero"):
            drop_zero_returns(ReturnSeries("x", dates, np.array([0.0, 0.0])))


class TestSummaryStats:
    def test_worked_example(self):
        """(0, 0, 0, 12): skewness 2/sqrt(3), kurtosis 7/3 with the
        n-divisor central moments."""
        s = summary_stats(np.array([0.0, 0.0, 0.0, 12.0]))
        assert s.skewness == pytest.approx(1.1547005383792515, abs=1e-12)
        assert s.kurtosis == pytest.approx(2.3333333333333335, abs=1e-12)
        assert s.mean == 3.0
        assert s.n == 4
        assert s.minimum == 0.0 and s.maximum == 12.0

    def test_symmetric_three_points(self):
        s = summary_stats(np.array([-1.0, 0.0, 1.0]))
        assert s.mean == 0.0
        assert s.skewness == 0.0
        assert s.kurtosis is None  # needs at least 4 observations

    def test_std_dev_uses_n_minus_1(self):
        s = summary_stats(np.array([0.0, 2.0]))
        assert s.std_dev == pytest.approx(math.sqrt(2.0), rel=1e-15)

    def test_kurtosis_of_big_normal_sample_is_near_3(self):
        """Kurtosis is reported raw, not excess."""
        x = np.random.default_rng(11).normal(0.0, 0.01, 200_000)
        s = summary_stats(x)
        assert abs(s.kurtosis - 3.0) < 0.1
        assert abs(s.skewness) < 0.05

    def test_constant_series_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            summary_stats(np.full(10, 3.25))

    def test_too_short_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            summary_stats(np.array([1.0]))

    def test_location_shift_moves_only_the_mean(self):
        rng = np.random.default_rng(5)
        x = rng.standard_t(5, 4000) * 0.01
        a, b = summary_stats(x), summary_stats(x + 0.37)
        assert b.mean == pytest.approx(a.mean + 0.37, abs=1e-12)
        assert b.std_dev == pytest.approx(a.std_dev, abs=1e-10)
        assert b.skewness == pytest.approx(a.skewness, abs=1e-10)
        assert b.kurtosis == pytest.approx(a.kurtosis, abs=1e-10)

    def test_order_invariance(self):
        rng = np.random.default_rng(6)
        x = rng.normal(0.0, 1.0, 999)
        a, b = summary_stats(x), summary_stats(x[::-1].copy())
        assert b.mean == pytest.approx(a.mean, abs=1e-12)
        assert b.skewness == pytest.approx(a.skewness, abs=1e-10)

    def test_accepts_return_series(self):
        import datetime
        dates = [datetime.date(2001, 1, 1) + datetime.timedelta(days=i) for i in range(4)]
        series = ReturnSeries("x", dates, np.array([0.0, 0.0, 0.0, 12.0]))
        assert summary_stats(series).n == 4
