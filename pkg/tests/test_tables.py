import json
import math

import numpy as np
import pytest

from emitter_energetics import energetics as en
from emitter_energetics import synthlab as sl
from emitter_energetics import tables
from emitter_energetics.errors import CsvFormatError


def test_trace_round_trip(tmp_path):
    tr = sl.simulate_trace(0.3, 1e3, sl.DriftModel(seed=1), duration=12.0)
    p = tables.write_trace(tmp_path / "t.csv", tr)
    back = tables.read_trace(p)
    assert back.n_bins == tr.n_bins
    assert back.bin_width == pytest.approx(tr.bin_width, rel=1e-12)
    np.testing.assert_array_equal(back.counts1, tr.counts1)
    np.testing.assert_array_equal(back.counts2, tr.counts2)
    assert p.read_text().splitlines()[0] == "t_s,counts1,counts2"


def test_histogram_round_trip(tmp_path):
    h = sl.simulate_hom_histogram(0.9, 0.02, 1e5, 1.0, True, seed=2)
    back = tables.read_histogram(tables.write_histogram(tmp_path / "h.csv", h))
    np.testing.assert_array_equal(back.peak_delays, h.peak_delays)
    np.testing.assert_array_equal(back.areas, h.areas)


def test_sweep_round_trip_is_exact(tmp_path):
    th = np.linspace(0, math.pi, 7)
    v = 0.1 + np.sqrt(th) / 3
    err = np.full(7, 1 / 3)
    t2, v2, e2 = tables.read_sweep(tables.write_sweep(tmp_path / "s.csv", th, v, err))
    # repr floats round trip bit for bit
    np.testing.assert_array_equal(t2, th)
    np.testing.assert_array_equal(v2, v)
    np.testing.assert_array_equal(e2, err)


def test_theory_header(tmp_path):
    curve = en.theory_curves([0.0, 1.0], 1.0, 1.0, en.QUBIT_TO_FIELD)
    p = tables.write_theory(tmp_path / "th.csv", curve)
    lines = p.read_text().splitlines()
    assert lines[0] == "theta_rad,total,unitary,correlation,visibility"
    assert len(lines) == 3


def test_header_mismatch_reports_line_one(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("delay,area\n0,1\n")
    with pytest.raises(CsvFormatError) as exc:
        tables.read_histogram(p)
    assert exc.value.line == 1


def test_bad_value_reports_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t_s,counts1,counts2\n0.0,1,1\n0.1,2,1\n0.2,two,1\n")
    with pytest.raises(CsvFormatError) as exc:
        tables.read_trace(p)
    assert exc.value.line == 4
    assert "bad.csv:4" in str(exc.value)


def test_wrong_field_count_and_negative(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("delay_pulses,area\n0,1\n1,2,3\n")
    with pytest.raises(CsvFormatError) as exc:
        tables.read_histogram(p)
    assert exc.value.line == 3
    p.write_text("delay_pulses,area\n0,1\n1,-2\n")
    with pytest.raises(CsvFormatError):
        tables.read_histogram(p)


def test_empty_file(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("")
    with pytest.raises(CsvFormatError):
        tables.read_sweep(p)


def test_non_uniform_trace_times(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("t_s,counts1,counts2\n0.0,1,1\n0.1,1,1\n0.5,1,1\n")
    with pytest.raises(CsvFormatError):
        tables.read_trace(p)


def test_sniff_kind(tmp_path):
    p = tables.write_sweep(tmp_path / "s.csv", [0.0, 1.0], [1.0, 0.5], [0.1, 0.1])
    assert tables.sniff_kind(p) == "sweep"
    q = tmp_path / "x.csv"
    q.write_text("a,b\n")
    with pytest.raises(CsvFormatError):
        tables.sniff_kind(q)


def test_json_is_sorted_versioned_and_stable(tmp_path):
    payload = {"b": np.float64(0.1), "a": [np.int64(3), float("nan")], "flag": np.bool_(True)}
    p1 = tables.write_json(tmp_path / "a.json", payload)
    p2 = tables.write_json(tmp_path / "b.json", payload)
    assert p1.read_bytes() == p2.read_bytes()
    doc = json.loads(p1.read_text())
    assert doc["schema_version"] == tables.SCHEMA_VERSION
    assert doc["a"] == [3, None]
    assert list(doc) == sorted(doc)


def test_atomic_write_leaves_no_temp_files(tmp_path):
    tables.atomic_write_text(tmp_path / "sub" / "f.txt", "x")
    assert [p.name for p in (tmp_path / "sub").iterdir()] == ["f.txt"]
