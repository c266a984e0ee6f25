"""Parameter scans of the effective two-level reduction over pump settings.

Each grid point is an independent, pure evaluation: override one or two pump
parameters of a base configuration, rebuild the six-level scheme and reduce
it.  Failures are recorded per point and never abort the scan; results are
stored row-major regardless of execution order, so output is deterministic
and independent of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .levels import sigma, expect, liouvillian_for, steady_state_dm
from .reduction import reduce_scheme
from .sr88 import SixLevelConfig, six_level_scheme

SCAN_PARAMETERS = ("Omega13", "Omega34", "Omega54", "Delta13", "Delta34", "Delta54")
SCAN_FIELDS = ("R", "delta1", "delta2", "nu1", "nu2", "nu", "pop5")


@dataclass(frozen=True)
class ScanAxis:
    """One scanned pump parameter: name, range in Hz, point count, spacing."""

    name: str
    start: float
    stop: float
    points: int
    log: bool = False

    def __post_init__(self):
        if self.name not in SCAN_PARAMETERS:
            raise ValueError(
                f"unknown scan parameter {self.name!r}; choose from {SCAN_PARAMETERS}")
        if self.points < 1:
            raise ValueError("points must be at least 1")
        if self.points > 1 and not self.start < self.stop:
            raise ValueError("start must be below stop")
        if self.log and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log spacing needs positive bounds")

    def values(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.start])
        if self.log:
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ScanSpec:
    """A 1D or 2D scan around a base configuration."""

    base: SixLevelConfig
    axes: tuple
    fields: tuple = ("R", "delta1", "nu")

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("scans take one or two axes")
        names = [ax.name for ax in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("scan axes must be distinct parameters")
        for f in self.fields:
            if f not in SCAN_FIELDS:
                raise ValueError(
                    f"unknown output field {f!r}; choose from {SCAN_FIELDS}")

    @property
    def shape(self) -> tuple:
        return tuple(ax.points for ax in self.axes)


@dataclass
class ScanResult:
    """Row-major field arrays over the scan grid, with per-point failures.

    ``values[field]`` has the grid shape, NaN at failed points; ``reasons``
    holds the failure description at those points and None elsewhere.
    """

    spec: ScanSpec
    coordinates: tuple               # one 1D Hz array per axis
    values: dict
    reasons: np.ndarray

    @property
    def shape(self) -> tuple:
        return self.spec.shape

    @property
    def failures(self) -> list:
        return [(idx, self.reasons[idx])
                for idx in np.ndindex(*self.shape) if self.reasons[idx] is not None]

    def rows(self):
        """Row-major (coords..., fields...) tuples, as written to CSV."""
        grids = np.meshgrid(*self.coordinates, indexing="ij")
        for idx in np.ndindex(*self.shape):
            coords = tuple(float(g[idx]) for g in grids)
            yield coords + tuple(float(self.values[f][idx]) for f in self.spec.fields)


def evaluate_point(base: SixLevelConfig, overrides: dict, fields) -> dict:
    """Reduce the six-level scheme at one parameter point (values in Hz)."""
    cfg = base.replace(**overrides)
    scheme = six_level_scheme(cfg)
    params = reduce_scheme(scheme)
    hz = params.as_hz_dict()
    out = {name: hz[f"{name}_hz"] for name in ("R", "delta1", "delta2",
                                               "nu1", "nu2", "nu")}
    if "pop5" in fields:
        rho = steady_state_dm(liouvillian_for(scheme))
        out["pop5"] = float(expect(rho, sigma(6, 5, 5)).real)
    return {f: out[f] for f in fields}


def run_scan(spec: ScanSpec, threads: int = 1) -> ScanResult:
    """Evaluate the reduction over the whole grid.

    Points are farmed out to a thread pool; each evaluation is pure, so a
    failing point only marks its own cell.
    """
    coords = tuple(ax.values() for ax in spec.axes)
    shape = spec.shape
    values = {f: np.full(shape, np.nan) for f in spec.fields}
    reasons = np.full(shape, None, dtype=object)
    names = [ax.name for ax in spec.axes]
    indices = list(np.ndindex(*shape))

    def work(idx):
        overrides = {name: float(coords[k][idx[k]]) for k, name in enumerate(names)}
        try:
            return idx, evaluate_point(spec.base, overrides, spec.fields), None
        except Exception as exc:  # record, never abort
            return idx, None, f"{type(exc).__name__}: {exc}"

    if threads <= 1:
        results = map(work, indices)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, indices))
    for idx, point, reason in results:
        if reason is None:
            for f, v in point.items():
                values[f][idx] = v
        else:
            reasons[idx] = reason
    return ScanResult(spec=spec, coordinates=coords, values=values, reasons=reasons)
