"""Loading, alignment, weekly resampling and sample splits."""
import numpy as np
import pytest

from hmmstatarb import market_data as md
from hmmstatarb.exceptions import DataError
from hmmstatarb.synthetic import business_days


def _write(tmp_path, name, rows, header="date,price"):
    p = tmp_path / name
    p.write_text(header + "\n" + "\n".join(rows) + "\n")
    return p


def test_load_csv_roundtrip(tmp_path):
    p = _write(tmp_path, "sc.csv", ["2022-01-03,70.5", "2022-01-04,71.25"])
    s = md.load_csv(p)
    assert s.name == "sc"
    assert s.dates.tolist() == list(np.array(["2022-01-03", "2022-01-04"], dtype="datetime64[D]"))
    assert np.array_equal(s.prices, [70.5, 71.25])


def test_load_csv_custom_columns(tmp_path):
    p = _write(tmp_path, "x.csv", ["2022-01-03,1,70"], header="Day,vol,Close")
    s = md.load_csv(p, date_column="Day", price_column="Close", name="WTI")
    assert s.name == "WTI" and s.prices[0] == 70


@pytest.mark.parametrize("row,msg", [
    ("2022-13-01,70", "unparsable date"),
    ("2022-01-05,abc", "non-numeric"),
    ("2022-01-05,-1", "positive"),
    ("2022-01-04,70", "duplicate"),
    ("2022-01-03,70", "out-of-order"),
])
def test_load_csv_rejects_bad_rows_with_line_number(tmp_path, row, msg):
    p = _write(tmp_path, "bad.csv", ["2022-01-04,70", row])
    with pytest.raises(DataError, match=msg) as exc:
        md.load_csv(p)
    assert ":3:" in str(exc.value)


def test_missing_file_and_column(tmp_path):
    with pytest.raises(DataError, match="cannot read"):
        md.load_csv(tmp_path / "nope.csv")
    p = _write(tmp_path, "c.csv", ["2022-01-04,70"], header="date,close")
    with pytest.raises(DataError, match="missing column 'price'"):
        md.load_csv(p)


def test_align_keeps_common_dates_in_order():
    d = np.array(["2022-01-03", "2022-01-04", "2022-01-05"], dtype="datetime64[D]")
    a = md.PriceSeries("a", d, [1.0, 2.0, 3.0])
    b = md.PriceSeries("b", d[[0, 2]], [10.0, 30.0])
    p = md.align([a, b])
    assert p.names == ("a", "b")
    assert p.dates.tolist() == d[[0, 2]].tolist()
    assert np.array_equal(p.values, [[1, 10], [3, 30]])
    with pytest.raises(DataError):
        md.align([a])


def test_calendar_counts_of_the_study_window():
    days = business_days("2018-03-26", "2023-06-30")
    assert days.size == 1375
    panel = md.PricePanel(("a", "b"), days, np.ones((days.size, 2)))
    train, test = md.split(panel, "2022-07-01")
    assert len(test) == 261
    assert len(train) == 1114
    weekly = md.resample_weekly(panel)
    # one row per ISO week; the window spans 275 of them
    assert len(weekly) == 275
    wtrain, wtest = md.split(weekly, "2022-07-01")
    assert len(wtest) == 53


def test_weekly_takes_last_day_of_each_iso_week():
    days = business_days("2021-12-27", "2022-01-14")  # ISO weeks 2021-52, 2022-01, 2022-02
    panel = md.PricePanel(("a", "b"), days, np.column_stack([np.arange(days.size), np.arange(days.size)]) + 1.0)
    w = md.resample_weekly(panel)
    assert [str(d) for d in w.dates] == ["2021-12-31", "2022-01-07", "2022-01-14"]
    assert md.iso_week_keys(w.dates).tolist() == [202152, 202201, 202202]


def test_split_and_sample_split_validation():
    days = business_days("2022-01-03", "2022-01-14")
    panel = md.PricePanel(("a", "b"), days, np.ones((days.size, 2)))
    with pytest.raises(DataError):
        md.split(panel, "2021-12-01")
    with pytest.raises(DataError):
        md.SampleSplit("2022-07-01", "2022-07-01", "2023-06-30")
    s = md.SampleSplit("2018-03-26", "2022-07-01", "2023-06-30")
    assert s.tB == np.datetime64("2022-07-01")


def test_panel_invariants():
    d = np.array(["2022-01-04", "2022-01-03"], dtype="datetime64[D]")
    with pytest.raises(DataError, match="increasing"):
        md.PricePanel(("a", "b"), d, np.ones((2, 2)))
    with pytest.raises(DataError, match="duplicate"):
        md.PricePanel(("a", "a"), d[::-1], np.ones((2, 2)))
