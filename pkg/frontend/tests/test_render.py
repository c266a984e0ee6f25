"""Tests of the figure renderer: spec validation, rendering, CSV contract."""

import shutil
import subprocess
import sys

import numpy as np
import pytest

from srfigures import (
    DegenerateFigureError,
    FigureSpecError,
    load_spec,
    read_csv,
    render,
)
from srfigures.render import main


def write_csv(path, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join("%.9g" % v for v in row) + "\n")


@pytest.fixture
def grid_csv(tmp_path):
    path = tmp_path / "scan.csv"
    x = np.linspace(1.0, 5.0, 9)
    y = np.linspace(10.0, 50.0, 9)
    rows = []
    for xv in x:
        for yv in y:
            r = xv * xv * yv / 100.0
            d1 = (xv - 3.0) * 1e-3
            rows.append((xv, yv, r, d1))
    write_csv(path, ["Omega13", "Omega34", "R", "delta1"], rows)
    return path


def heatmap_spec(tmp_path, csv_path, **extra):
    spec_path = tmp_path / "fig.toml"
    lines = [
        'kind = "heatmap2d"',
        'output = "out/fig.png"',
        'field = "R"',
    ]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    lines += ["[[input]]", f'path = "{csv_path}"']
    spec_path.write_text("\n".join(lines) + "\n")
    return spec_path


class TestSpecValidation:
    def test_unknown_kind(self, tmp_path):
        p = tmp_path / "s.toml"
        p.write_text('kind = "pie"\noutput = "x.png"\n[[input]]\npath = "a"\n')
        with pytest.raises(FigureSpecError):
            load_spec(p)

    def test_missing_input(self, tmp_path):
        p = tmp_path / "s.toml"
        p.write_text('kind = "spectrum"\noutput = "x.png"\n')
        with pytest.raises(FigureSpecError):
            load_spec(p)

    def test_contour_only_for_heatmaps(self, tmp_path):
        p = tmp_path / "s.toml"
        p.write_text('kind = "spectrum"\noutput = "x.png"\ncontour = 1.0\n'
                     '[[input]]\npath = "a.csv"\n')
        with pytest.raises(FigureSpecError):
            load_spec(p)

    def test_relative_paths_resolve_against_spec(self, tmp_path, grid_csv):
        sub = tmp_path / "sub"
        sub.mkdir()
        shutil.copy(grid_csv, sub / "scan.csv")
        p = sub / "s.toml"
        p.write_text('kind = "heatmap2d"\noutput = "fig.png"\nfield = "R"\n'
                     '[[input]]\npath = "scan.csv"\n')
        spec = load_spec(p)
        assert spec["input"][0]["path"] == str(sub / "scan.csv")
        assert spec["output"] == str(sub / "fig.png")


class TestCsvContract:
    def test_round_trip(self, grid_csv):
        cols = read_csv(grid_csv)
        assert list(cols) == ["Omega13", "Omega34", "R", "delta1"]
        assert len(cols["R"]) == 81

    def test_non_numeric_cell(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b\n1,fast\n")
        with pytest.raises(FigureSpecError):
            read_csv(p)

    def test_empty_rejected(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("a,b\n")
        with pytest.raises(DegenerateFigureError):
            read_csv(p)


class TestHeatmap:
    def test_render_with_contour(self, tmp_path, grid_csv):
        spec = load_spec(heatmap_spec(tmp_path, grid_csv, contour=0.5))
        written = render(spec)
        assert [p.rsplit(".", 1)[1] for p in written] == ["png", "svg"]
        for p in written:
            assert (tmp_path / "out").exists()
            assert open(p, "rb").read(4)

    def test_diverging_scale_for_shift(self, tmp_path, grid_csv):
        spec_path = tmp_path / "d1.toml"
        spec_path.write_text(
            'kind = "heatmap2d"\noutput = "d1.png"\nfield = "delta1"\n'
            f'scale = "diverging"\nmagnitude = false\n'
            f'[[input]]\npath = "{grid_csv}"\n')
        assert len(render(load_spec(spec_path))) == 2

    def test_missing_field(self, tmp_path, grid_csv):
        spec = load_spec(heatmap_spec(tmp_path, grid_csv))
        spec["field"] = "bogus"
        with pytest.raises(FigureSpecError):
            render(spec)

    def test_single_point_grid_degenerate(self, tmp_path):
        p = tmp_path / "one.csv"
        write_csv(p, ["x", "y", "R"], [(1.0, 2.0, 3.0)])
        spec = load_spec(heatmap_spec(tmp_path, p))
        with pytest.raises(DegenerateFigureError):
            render(spec)

    def test_incomplete_grid(self, tmp_path):
        p = tmp_path / "ragged.csv"
        write_csv(p, ["x", "y", "R"],
                  [(1, 1, 1), (1, 2, 1), (2, 1, 1), (2, 2, 1), (3, 1, 1)])
        spec = load_spec(heatmap_spec(tmp_path, p))
        with pytest.raises(FigureSpecError):
            render(spec)


class TestLinesAndSpectra:
    def test_lines1d(self, tmp_path):
        p = tmp_path / "sweep.csv"
        x = np.linspace(0, 1, 20)
        write_csv(p, ["Delta54", "R", "delta1"],
                  np.column_stack([x, x ** 2, np.sin(x)]))
        spec_path = tmp_path / "l.toml"
        spec_path.write_text(
            f'kind = "lines1d"\noutput = "l.png"\n'
            f'[[input]]\npath = "{p}"\n')
        assert len(render(load_spec(spec_path))) == 2

    def test_spectrum_overlay(self, tmp_path):
        freq = np.linspace(-0.01, 0.01, 200)
        for name, width in (("a.csv", 1e-3), ("b.csv", 2e-3)):
            s = 1.0 / (1.0 + (freq / width) ** 2)
            write_csv(tmp_path / name, ["freq_hz", "S"],
                      np.column_stack([freq, s]))
        spec_path = tmp_path / "s.toml"
        spec_path.write_text(
            'kind = "spectrum"\noutput = "s.png"\n'
            '[[input]]\npath = "a.csv"\nlabel = "narrow"\n'
            '[[input]]\npath = "b.csv"\nlabel = "broad"\nstyle = "--"\n')
        assert len(render(load_spec(spec_path))) == 2

    def test_spectrum_missing_column(self, tmp_path):
        p = tmp_path / "bad.csv"
        write_csv(p, ["f", "S"], [(0, 1), (1, 2)])
        spec_path = tmp_path / "s.toml"
        spec_path.write_text(
            f'kind = "spectrum"\noutput = "s.png"\n[[input]]\npath = "{p}"\n')
        with pytest.raises(FigureSpecError):
            render(load_spec(spec_path))

    def test_single_point_spectrum_degenerate(self, tmp_path):
        p = tmp_path / "one.csv"
        write_csv(p, ["freq_hz", "S"], [(0.0, 1.0)])
        spec_path = tmp_path / "s.toml"
        spec_path.write_text(
            f'kind = "spectrum"\noutput = "s.png"\n[[input]]\npath = "{p}"\n')
        with pytest.raises(DegenerateFigureError):
            render(load_spec(spec_path))


class TestCliEntry:
    def test_exit_codes(self, tmp_path, grid_csv):
        good = heatmap_spec(tmp_path, grid_csv)
        assert main([str(good)]) == 0
        bad = tmp_path / "bad.toml"
        bad.write_text('kind = "pie"\n')
        assert main([str(bad)]) == 1


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "srlaser.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


def test_a9_paper_figures_from_pipeline_outputs(tmp_path, capsys):
    """A9: heatmap + contour and overlaid two-vs-six spectra, rendered
    purely from the simulation CLI's CSV outputs."""
    scan_csv = tmp_path / "scan.csv"
    _cli("scan", "--axis", "Omega13:1e2:1e4:40:log",
         "--axis", "Omega34:3e5:3e7:40:log",
         "--fields", "R,delta1", "--threads", "8", "--out", str(scan_csv))
    for model in ("two", "six"):
        _cli("spectrum", "--model", model,
             "--out", str(tmp_path / f"spectrum_{model}.csv"))

    heat = tmp_path / "heat.toml"
    heat.write_text(
        'kind = "heatmap2d"\noutput = "heat.png"\nfield = "R"\n'
        'contour = 1.0\n[[input]]\npath = "scan.csv"\n'
        '[axes]\nxscale = "log"\nyscale = "log"\n')
    render(load_spec(heat))
    assert all((tmp_path / f"heat.{ext}").exists() for ext in ("png", "svg"))
    assert "contour level" not in capsys.readouterr().err   # contour non-empty

    overlay = tmp_path / "overlay.toml"
    overlay.write_text(
        'kind = "spectrum"\noutput = "overlay.png"\n'
        '[[input]]\npath = "spectrum_six.csv"\nlabel = "six-level"\n'
        '[[input]]\npath = "spectrum_two.csv"\nlabel = "two-level"\n'
        'style = "--"\n')
    written = render(load_spec(overlay))
    assert all((tmp_path / f"overlay.{ext}").exists()
               for ext in ("png", "svg"))
    print("A9: PASS — heatmap with R = 1 Hz contour and two-vs-six spectrum "
          "overlay rendered from CLI CSV outputs only")
