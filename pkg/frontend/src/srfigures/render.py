"""Render figures from scan/spectrum CSV files, driven by a TOML spec.

The renderer is strictly read-only over its inputs: it consumes the CSV
contract of the simulation command-line tool (axis columns then field
columns, header row) and never recomputes any physics.  Three figure kinds
are supported:

- ``heatmap2d``: a 2D scan mapped to color; the pump rate gets a log color
  scale, shift-like fields a symmetric diverging scale, with an optional
  white iso-line overlay.
- ``lines1d``: fields of a 1D scan against its axis.
- ``spectrum``: one or more spectra (freq_hz, S) overlaid.

Every render emits both PNG and SVG next to the requested output path.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
from matplotlib.colors import LogNorm  # noqa: E402

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

KINDS = ("heatmap2d", "lines1d", "spectrum")


class FigureSpecError(ValueError):
    """The figure spec or its input CSVs violate the schema."""


class DegenerateFigureError(FigureSpecError):
    """The input holds too few points to draw the requested figure."""


def read_csv(path) -> dict:
    """A CSV with a header row as {column: float array}; schema errors raise."""
    try:
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
    except OSError as exc:
        raise FigureSpecError(f"cannot read {path}: {exc}")
    if not rows or len(rows[0]) < 2:
        raise FigureSpecError(f"{path}: expected a header row with >= 2 columns")
    header = rows[0]
    if len(set(header)) != len(header):
        raise FigureSpecError(f"{path}: duplicate column names in header")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]])
    except ValueError as exc:
        raise FigureSpecError(f"{path}: non-numeric cell ({exc})")
    if data.size == 0:
        raise DegenerateFigureError(f"{path}: no data rows")
    if data.shape[1] != len(header):
        raise FigureSpecError(f"{path}: ragged rows")
    return {name: data[:, k] for k, name in enumerate(header)}


def load_spec(path) -> dict:
    try:
        with open(path, "rb") as f:
            spec = tomllib.load(f)
    except OSError as exc:
        raise FigureSpecError(str(exc))
    except tomllib.TOMLDecodeError as exc:
        raise FigureSpecError(f"{path}: {exc}")
    kind = spec.get("kind")
    if kind not in KINDS:
        raise FigureSpecError(f"kind must be one of {KINDS}, got {kind!r}")
    if not spec.get("output"):
        raise FigureSpecError("spec needs an 'output' image path")
    inputs = spec.get("input")
    if not inputs:
        raise FigureSpecError("spec needs at least one [[input]] table")
    if isinstance(inputs, dict):
        inputs = [inputs]
    for entry in inputs:
        if "path" not in entry:
            raise FigureSpecError("every [[input]] needs a 'path'")
    spec["input"] = inputs
    if "contour" in spec and kind != "heatmap2d":
        raise FigureSpecError("'contour' is only valid for heatmap2d figures")
    if kind == "heatmap2d" and len(inputs) != 1:
        raise FigureSpecError("heatmap2d takes exactly one input CSV")
    base = Path(path).parent
    for entry in inputs:
        entry["path"] = str((base / entry["path"]).resolve())
    spec["output"] = str((base / spec["output"]).resolve())
    return spec


def _grid_axes(cols: dict):
    """Recover the 2D grid from row-major CSV columns (first two columns)."""
    names = list(cols)
    x0 = np.unique(cols[names[0]])
    x1 = np.unique(cols[names[1]])
    if len(x0) < 2 or len(x1) < 2:
        raise DegenerateFigureError(
            f"grid is {len(x0)}x{len(x1)}; a heatmap needs >= 2x2 points")
    if len(x0) * len(x1) != len(cols[names[0]]):
        raise FigureSpecError("rows do not form a complete rectangular grid")
    return names[0], names[1], x0, x1


def _field_grid(cols, field, shape):
    if field not in cols:
        raise FigureSpecError(
            f"field {field!r} not among columns {list(cols)}")
    return cols[field].reshape(shape)


def _color_scale(field: str, values: np.ndarray, requested: str | None):
    """(norm, cmap): log for rates, symmetric diverging for shift-like fields."""
    scale = requested
    if scale is None:
        scale = "diverging" if "delta" in field.lower() else "log"
    if scale == "log":
        positive = values[np.isfinite(values) & (values > 0)]
        if positive.size == 0:
            raise FigureSpecError(
                f"log color scale needs positive values in {field!r}")
        return LogNorm(vmin=positive.min(), vmax=positive.max()), "viridis"
    if scale == "diverging":
        lim = np.nanmax(np.abs(values))
        lim = lim if lim > 0 else 1.0
        return plt.Normalize(vmin=-lim, vmax=lim), "RdBu_r"
    if scale == "linear":
        return plt.Normalize(vmin=np.nanmin(values), vmax=np.nanmax(values)), \
            "viridis"
    raise FigureSpecError(f"unknown color scale {scale!r}")


def _apply_labels(ax, spec, default_x=None, default_y=None):
    axes = spec.get("axes", {})
    ax.set_xlabel(axes.get("xlabel", default_x or ""))
    ax.set_ylabel(axes.get("ylabel", default_y or ""))
    if axes.get("title"):
        ax.set_title(axes["title"])
    if axes.get("xscale"):
        ax.set_xscale(axes["xscale"])
    if axes.get("yscale"):
        ax.set_yscale(axes["yscale"])


def render_heatmap2d(spec, fig):
    entry = spec["input"][0]
    cols = read_csv(entry["path"])
    field = spec.get("field") or entry.get("field")
    if not field:
        raise FigureSpecError("heatmap2d needs a 'field' to map")
    xname, yname, x0, x1 = _grid_axes(cols)
    z = _field_grid(cols, field, (len(x0), len(x1)))
    values = np.abs(z) if spec.get("magnitude", field.lower().startswith("delta")) \
        else z
    norm, cmap = _color_scale(field, values, spec.get("scale"))

    ax = fig.add_subplot(111)
    mesh = ax.pcolormesh(x0, x1, values.T, norm=norm, cmap=cmap,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label=spec.get("colorbar_label", field))
    if "contour" in spec:
        # the iso-line may come from a different column than the color map
        # (e.g. the pump-rate threshold drawn over a shift map)
        cz = _field_grid(cols, spec.get("contour_field", field),
                         (len(x0), len(x1)))
        cs = ax.contour(x0, x1, cz.T, levels=[float(spec["contour"])],
                        colors="white", linewidths=1.5)
        if not cs.allsegs[0]:
            print(f"warning: contour level {spec['contour']} is empty",
                  file=sys.stderr)
    _apply_labels(ax, spec, default_x=xname, default_y=yname)


def render_lines1d(spec, fig):
    ax = fig.add_subplot(111)
    drew = False
    for entry in spec["input"]:
        cols = read_csv(entry["path"])
        names = list(cols)
        x = cols[names[0]]
        if len(x) < 2:
            raise DegenerateFigureError(
                f"{entry['path']}: a line plot needs >= 2 points")
        fields = entry.get("fields") or spec.get("fields") or names[1:]
        for field in fields:
            if field not in cols:
                raise FigureSpecError(
                    f"field {field!r} not among columns {names}")
            label = entry.get("label", field)
            ax.plot(x, cols[field], label=label)
            drew = True
        default_x = names[0]
    if not drew:
        raise FigureSpecError("nothing to plot: no fields selected")
    ax.legend()
    _apply_labels(ax, spec, default_x=default_x)


def render_spectrum(spec, fig):
    ax = fig.add_subplot(111)
    for entry in spec["input"]:
        cols = read_csv(entry["path"])
        for col in ("freq_hz", "S"):
            if col not in cols:
                raise FigureSpecError(
                    f"{entry['path']}: spectrum CSV needs column {col!r}")
        if len(cols["freq_hz"]) < 2:
            raise DegenerateFigureError(
                f"{entry['path']}: a spectrum plot needs >= 2 points")
        style = entry.get("style", "-")
        ax.plot(1e3 * cols["freq_hz"], cols["S"], style,
                label=entry.get("label", Path(entry["path"]).stem))
    ax.legend()
    _apply_labels(ax, spec, default_x="frequency offset (mHz)",
                  default_y="S (arb. units)")


RENDERERS = {
    "heatmap2d": render_heatmap2d,
    "lines1d": render_lines1d,
    "spectrum": render_spectrum,
}


def render(spec: dict) -> list:
    """Render one figure spec; returns the written file paths (PNG and SVG)."""
    fig = plt.figure(figsize=tuple(spec.get("figsize", (6.0, 4.5))))
    try:
        RENDERERS[spec["kind"]](spec, fig)
        out = Path(spec["output"])
        out.parent.mkdir(parents=True, exist_ok=True)
        stem = out.with_suffix("")
        written = []
        for ext in (".png", ".svg"):
            target = stem.with_suffix(ext)
            fig.savefig(target, dpi=150, metadata=None if ext == ".png"
                        else {"Date": None})
            written.append(str(target))
        return written
    finally:
        plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Render a figure from simulation CSV output.")
    parser.add_argument("spec", help="TOML figure spec")
    args = parser.parse_args(argv)
    try:
        written = render(load_spec(args.spec))
    except FigureSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
