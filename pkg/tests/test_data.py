"""Loading, alignment, supervised assembly, and chronological splitting."""

from datetime import date

import numpy as np
import pytest

from fuzzycast.data import (
    TimeSeries,
    align,
    lead,
    load_candles,
    make_supervised,
    minmax_stats,
    split_chronological,
    supervised_csv,
)
from fuzzycast.errors import (
    DegenerateSplitError,
    EmptyIntersectionError,
    InvalidSeriesError,
    LengthMismatchError,
    MissingColumnError,
    MissingFileError,
    TooShortError,
    UnparseableRowError,
)

from conftest import day_range, make_set


class TestTimeSeries:
    def test_values_coerced_to_float64(self):
        ts = TimeSeries("s", day_range(3), [1, 2, 3])
        assert ts.values.dtype == np.float64

    def test_dates_must_increase(self):
        d = day_range(3)
        with pytest.raises(InvalidSeriesError):
            TimeSeries("s", (d[0], d[2], d[1]), [1.0, 2.0, 3.0])

    def test_duplicate_dates_rejected(self):
        d = day_range(2)
        with pytest.raises(InvalidSeriesError):
            TimeSeries("s", (d[0], d[0]), [1.0, 2.0])

    def test_nan_rejected(self):
        with pytest.raises(InvalidSeriesError):
            TimeSeries("s", day_range(2), [1.0, float("nan")])

    def test_length_mismatch(self):
        with pytest.raises(InvalidSeriesError):
            TimeSeries("s", day_range(3), [1.0, 2.0])


class TestLoadCandles:
    def test_loads_and_sorts(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text(
            "date,open,close\n"
            "2021-01-03,9,30.5\n"
            "2021-01-01,9,10.5\n"
            "2021-01-02,9,20.5\n"
        )
        ts = load_candles(p, "date", "close")
        assert ts.name == "x"
        assert list(ts.values) == [10.5, 20.5, 30.5]
        assert ts.dates[0] == date(2021, 1, 1)

    def test_explicit_name_wins(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("date,close\n2021-01-01,1.0\n")
        assert load_candles(p, "date", "close", name="btc").name == "btc"

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFileError):
            load_candles(tmp_path / "absent.csv", "date", "close")

    def test_missing_column(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("date,open\n2021-01-01,1.0\n")
        with pytest.raises(MissingColumnError) as exc:
            load_candles(p, "date", "close")
        assert exc.value.column == "close"

    def test_bad_value_reports_line_number(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("date,close\n2021-01-01,1.0\n2021-01-02,oops\n")
        with pytest.raises(UnparseableRowError) as exc:
            load_candles(p, "date", "close")
        assert exc.value.line_number == 3

    def test_bad_date_reports_line_number(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("date,close\n01/02/2021,1.0\n")
        with pytest.raises(UnparseableRowError) as exc:
            load_candles(p, "date", "close")
        assert exc.value.line_number == 2

    def test_non_finite_value_rejected(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("date,close\n2021-01-01,inf\n")
        with pytest.raises(UnparseableRowError):
            load_candles(p, "date", "close")

    def test_header_only_is_too_short(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("date,close\n")
        with pytest.raises(TooShortError):
            load_candles(p, "date", "close")

    def test_duplicate_date_rejected(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("date,close\n2021-01-01,1.0\n2021-01-01,2.0\n")
        with pytest.raises(UnparseableRowError):
            load_candles(p, "date", "close")


class TestAlign:
    def test_intersection_only(self):
        a = TimeSeries("a", day_range(5), np.arange(5.0))
        b = TimeSeries("b", day_range(5, start=date(2021, 1, 3)), np.arange(5.0) + 10)
        out = align([a, b])
        assert [len(ts) for ts in out] == [3, 3]
        assert out[0].dates == out[1].dates
        assert list(out[0].values) == [2.0, 3.0, 4.0]
        assert list(out[1].values) == [10.0, 11.0, 12.0]

    def test_disjoint_calendars(self):
        a = TimeSeries("a", day_range(3), [1.0, 2.0, 3.0])
        b = TimeSeries("b", day_range(3, start=date(2022, 1, 1)), [1.0, 2.0, 3.0])
        with pytest.raises(EmptyIntersectionError):
            align([a, b])

    def test_single_series_passthrough(self):
        a = TimeSeries("a", day_range(4), np.arange(4.0))
        (out,) = align([a])
        assert out.dates == a.dates
        np.testing.assert_array_equal(out.values, a.values)


class TestLead:
    def test_shifts_tomorrow_onto_today(self):
        a = TimeSeries("a", day_range(4), [10.0, 20.0, 30.0, 40.0])
        led = lead(a)
        assert led.name == "a(k+1)"
        assert len(led) == 3
        assert led.dates == a.dates[:-1]
        assert list(led.values) == [20.0, 30.0, 40.0]

    def test_custom_name(self):
        a = TimeSeries("a", day_range(2), [1.0, 2.0])
        assert lead(a, name="predicted(a)@k+1").name == "predicted(a)@k+1"

    def test_too_short(self):
        a = TimeSeries("a", day_range(1), [1.0])
        with pytest.raises(TooShortError):
            lead(a)


class TestMakeSupervised:
    def test_one_step_layout(self):
        # inputs at day k predict the target at day k+1
        a = TimeSeries("a", day_range(4), [1.0, 2.0, 3.0, 4.0])
        y = TimeSeries("y", day_range(4), [10.0, 20.0, 30.0, 40.0])
        ss = make_supervised([a], y)
        assert ss.n_rows == 3
        assert ss.input_names == ("a",)
        np.testing.assert_array_equal(ss.inputs[:, 0], [1.0, 2.0, 3.0])
        np.testing.assert_array_equal(ss.targets, [20.0, 30.0, 40.0])
        assert ss.dates == day_range(3)

    def test_calendars_must_match(self):
        a = TimeSeries("a", day_range(4), np.arange(4.0))
        y = TimeSeries("y", day_range(4, start=date(2021, 1, 2)), np.arange(4.0))
        with pytest.raises(LengthMismatchError):
            make_supervised([a], y)

    def test_needs_two_days(self):
        a = TimeSeries("a", day_range(1), [1.0])
        y = TimeSeries("y", day_range(1), [2.0])
        with pytest.raises(TooShortError):
            make_supervised([a], y)


class TestSplit:
    def test_floor_split(self):
        ss = make_set(np.arange(10.0), np.arange(10.0))
        train, test = split_chronological(ss, 0.75)
        assert (train.n_rows, test.n_rows) == (7, 3)
        # chronological: every training day precedes every test day
        assert train.dates[-1] < test.dates[0]

    def test_large_floor_example(self):
        ss = make_set(np.arange(1889.0), np.arange(1889.0))
        train, test = split_chronological(ss, 0.9)
        assert (train.n_rows, test.n_rows) == (1700, 189)

    def test_degenerate_low(self):
        ss = make_set(np.arange(3.0), np.arange(3.0))
        with pytest.raises(DegenerateSplitError):
            split_chronological(ss, 0.1)

    def test_two_rows_can_split_in_half(self):
        # floor(0.99 * 2) = 1, so even an extreme fraction leaves one test row
        ss = make_set(np.arange(2.0), np.arange(2.0))
        train, test = split_chronological(ss, 0.99)
        assert (train.n_rows, test.n_rows) == (1, 1)

    def test_degenerate_small_fraction(self):
        ss = make_set(np.arange(2.0), np.arange(2.0))
        with pytest.raises(DegenerateSplitError):
            split_chronological(ss, 0.4)

    def test_single_row_cannot_split(self):
        ss = make_set(np.array([1.0]), np.array([1.0]))
        with pytest.raises(DegenerateSplitError):
            split_chronological(ss, 0.5)


class TestStatsAndCsv:
    def test_minmax(self):
        ss = make_set(np.array([[1.0, -2.0], [3.0, 4.0]]), np.array([5.0, 6.0]))
        st = minmax_stats(ss)
        np.testing.assert_array_equal(st.input_min, [1.0, -2.0])
        np.testing.assert_array_equal(st.input_max, [3.0, 4.0])
        assert (st.target_min, st.target_max) == (5.0, 6.0)

    def test_csv_round_trip_exact_floats(self):
        vals = np.array([0.1 + 0.2, 1e-17, 12345.678901234567])
        ss = make_set(vals, vals * 3)
        text = supervised_csv(ss)
        lines = text.strip().split("\n")
        assert lines[0] == "date,x0,y"
        cell = lines[1].split(",")[1]
        assert float(cell) == vals[0]
