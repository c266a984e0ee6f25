"""Figure rendering for scan/spectrum CSV outputs."""

from .render import (
    DegenerateFigureError,
    FigureSpecError,
    load_spec,
    read_csv,
    render,
)

__all__ = [
    "DegenerateFigureError",
    "FigureSpecError",
    "load_spec",
    "read_csv",
    "render",
]

__version__ = "0.1.0"
