import numpy as np
import pytest

from drivenlevel.errors import ConfigError
from drivenlevel.svgplot import line_plot
from drivenlevel.traceio import read_trace, write_trace
from drivenlevel.volterra import PropagatorTrace, TimeGrid


def sample_trace(n=40):
    grid = TimeGrid(0.0, 0.05, n)
    t = grid.times()
    u = np.exp(-1j * 1.7 * t) * np.exp(-0.03 * t)
    return PropagatorTrace(grid, u)


def test_round_trip_exact(tmp_path):
    tr = sample_trace()
    path = tmp_path / "trace.csv"
    write_trace(path, tr, config={"note": 7})
    back, meta = read_trace(path)
    assert back.grid.t0 == tr.grid.t0
    assert back.grid.h == tr.grid.h
    assert back.grid.n_steps == tr.grid.n_steps
    # 17 significant digits reproduce doubles exactly
    assert np.array_equal(back.values, tr.values)
    assert meta["config"] == {"note": 7}
    assert meta["n_steps"] == 40


def test_extra_columns_round_trip(tmp_path):
    tr = sample_trace(10)
    ref = np.abs(np.cos(tr.grid.times()))
    path = tmp_path / "trace.csv"
    write_trace(path, tr, extra_columns={"ref": ref})
    text = path.read_text()
    assert "ref" in text.splitlines()[1].split(",")
    back, _ = read_trace(path)   # extra columns are tolerated
    assert back.grid.n_steps == 10


def test_missing_meta_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,re_u,im_u,abs_u\n0,1,0,1\n")
    with pytest.raises(ConfigError):
        read_trace(path)


def test_foreign_format_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text('# {"format": "other", "version": 1, "t0": 0, '
                    '"h": 0.1, "n_steps": 1}\nt,re_u,im_u,abs_u\n'
                    "0,1,0,1\n0.1,1,0,1\n")
    with pytest.raises(ConfigError):
        read_trace(path)


def test_truncated_rows_rejected(tmp_path):
    tr = sample_trace(5)
    path = tmp_path / "trace.csv"
    write_trace(path, tr)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-2]) + "\n")
    with pytest.raises(ConfigError):
        read_trace(path)


def test_wrong_columns_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text('# {"format": "drivenlevel-trace", "version": 1, '
                    '"t0": 0, "h": 0.1, "n_steps": 1}\nt,x,y\n0,1,0\n0.1,1,0\n')
    with pytest.raises(ConfigError):
        read_trace(path)


def test_svg_plot_structure(tmp_path):
    tr = sample_trace(200)
    t = tr.grid.times()
    path = tmp_path / "plot.svg"
    line_plot(path, [(t, np.abs(tr.values), "|u|"),
                     (t, 0.5 * np.ones_like(t), "floor")],
              title="survival", xlabel="t", ylabel="|u(t)|")
    text = path.read_text()
    assert text.startswith("<svg")
    assert text.count("<polyline") >= 2
    assert "survival" in text and "|u(t)|" in text
    assert "floor" in text   # legend entry


def test_svg_skips_nan_segments(tmp_path):
    x = np.linspace(0.0, 1.0, 50)
    y = np.sin(x)
    y[20:25] = np.nan
    path = tmp_path / "plot.svg"
    line_plot(path, [(x, y, "curve")])
    text = path.read_text()
    assert "nan" not in text.lower()
