"""Command-line front end: reduce, scan, spectrum, laser-compare, dump-equations.

Configuration is TOML with the same all-Hz schema as the shipped
``sr88_defaults.toml``; a user file may be partial and is merged over those
defaults.  Exit codes: 0 success, 1 bad configuration, 2 numerical failure.
All CSV output is deterministic: fixed header, row-major order, 9 significant
digits, independent of the thread count.
"""

from __future__ import annotations

import json
import sys
from math import pi

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .contours import contour_level
from .cumulant import build_moment_system
from .laser import SteadyStateConvergenceError, laser_spectrum
from .levels import DegenerateSteadyStateError, SchemeError, StiffnessError
from .reduction import EigenvectorAmbiguityError, reduce_scheme
from .scan import SCAN_FIELDS, SCAN_PARAMETERS, ScanAxis, ScanSpec, run_scan
from .sr88 import (LaserConfig, SixLevelConfig, load_defaults,
                   six_level_laser_model, six_level_scheme,
                   two_level_laser_model)

TWOPI = 2 * pi

EXIT_BAD_CONFIG = 1
EXIT_NUMERICAL = 2

_NUMERICAL_ERRORS = (SteadyStateConvergenceError, DegenerateSteadyStateError,
                     StiffnessError, EigenvectorAmbiguityError,
                     np.linalg.LinAlgError, FloatingPointError)


class ConfigError(click.ClickException):
    exit_code = EXIT_BAD_CONFIG

    def __init__(self, message):
        super().__init__(f"bad config: {message}")


class NumericalError(click.ClickException):
    exit_code = EXIT_NUMERICAL

    def __init__(self, message):
        super().__init__(f"numerical failure: {message}")


def _load_config(path):
    """Shipped defaults merged with a user TOML file; returns the raw dict."""
    data = load_defaults()
    if path is None:
        return data
    try:
        with open(path, "rb") as f:
            user = tomllib.load(f)
    except OSError as exc:
        raise ConfigError(str(exc))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}")
    for section, entries in user.items():
        if section not in data:
            raise ConfigError(f"{path}: unknown section [{section}]")
        if not isinstance(entries, dict):
            raise ConfigError(f"{path}: [{section}] must be a table")
        for key, value in entries.items():
            if key not in data[section]:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
            if not isinstance(value, (int, float)):
                raise ConfigError(
                    f"{path}: [{section}] {key} must be a number, got {value!r}")
            data[section][key] = value
    return data


def _six_level_config(data) -> SixLevelConfig:
    kw = dict(data["pump"])
    kw.update({k: v for k, v in data["decay"].items()})
    kw.update({k: v for k, v in data["dephasing"].items()})
    try:
        return SixLevelConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def _laser_config(data) -> LaserConfig:
    kw = dict(data["cavity"])
    kw["N"] = int(kw["N"])
    try:
        return LaserConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))


def _reduce(cfg: SixLevelConfig):
    try:
        return reduce_scheme(six_level_scheme(cfg))
    except _NUMERICAL_ERRORS as exc:
        raise NumericalError(str(exc))
    except SchemeError as exc:
        raise ConfigError(str(exc))


def _fmt(x: float) -> str:
    return "%.9g" % x


def _sidecar(path, data, payload):
    """JSON sidecar next to a CSV: run results + config echo + version."""
    payload = dict(payload)
    payload["config"] = data
    payload["version"] = __version__
    sidecar = path.rsplit(".", 1)[0] + ".json" if path.endswith(".csv") \
        else path + ".json"
    with open(sidecar, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    return sidecar


@click.group()
@click.version_option(__version__)
def main():
    """Repumped-clock-atom reduction and superradiant laser spectra."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="TOML config; omitted keys fall back to shipped defaults.")
def reduce(config_path):
    """Reduce the six-level pump scheme; print the result as plain-Hz JSON."""
    data = _load_config(config_path)
    params = _reduce(_six_level_config(data))
    click.echo(json.dumps(params.as_hz_dict(), indent=2))


def _parse_axis(text: str) -> ScanAxis:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise ConfigError(
            f"axis {text!r}: expected NAME:MIN:MAX:POINTS[:log]")
    name, lo, hi, pts = parts[:4]
    log = False
    if len(parts) == 5:
        if parts[4] != "log":
            raise ConfigError(f"axis {text!r}: trailing token must be 'log'")
        log = True
    try:
        return ScanAxis(name=name, start=float(lo), stop=float(hi),
                        points=int(pts), log=log)
    except ValueError as exc:
        raise ConfigError(f"axis {text!r}: {exc}")


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--axis", "axes", multiple=True, required=True, metavar="NAME:MIN:MAX:POINTS[:log]",
              help=f"Scanned parameter (repeatable, at most twice); names: {', '.join(SCAN_PARAMETERS)}.")
@click.option("--fields", default="R,delta1,nu",
              help=f"Comma-separated output columns from: {', '.join(SCAN_FIELDS)}.")
@click.option("--threads", default=1, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Output CSV path; a JSON sidecar is written next to it.")
def scan(config_path, axes, fields, threads, out_path):
    """Scan the reduction over a 1D or 2D pump-parameter grid; write CSV."""
    data = _load_config(config_path)
    base = _six_level_config(data)
    field_list = tuple(f.strip() for f in fields.split(",") if f.strip())
    try:
        spec = ScanSpec(base=base, axes=tuple(_parse_axis(a) for a in axes),
                        fields=field_list)
    except ValueError as exc:
        raise ConfigError(str(exc))
    result = run_scan(spec, threads=threads)
    n_failed = len(result.failures)
    if n_failed == len(list(np.ndindex(*result.shape))):
        raise NumericalError(
            f"all grid points failed; first: {result.failures[0][1]}")
    header = [ax.name for ax in spec.axes] + list(spec.fields)
    with open(out_path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in result.rows():
            f.write(",".join(_fmt(v) for v in row) + "\n")
    _sidecar(out_path, data, {
        "command": "scan",
        "axes": [{"name": ax.name, "start": ax.start, "stop": ax.stop,
                  "points": ax.points, "log": ax.log} for ax in spec.axes],
        "fields": list(spec.fields),
        "failed_points": n_failed,
        "failures": [{"index": list(idx), "reason": reason}
                     for idx, reason in result.failures],
    })
    if n_failed:
        click.echo(f"warning: {n_failed} grid point(s) failed; "
                   "see the JSON sidecar", err=True)
    click.echo(out_path)


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--model", "which", type=click.Choice(["two", "six"]),
              default="two", show_default=True,
              help="Effective two-level pipeline or the full six-level model.")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Output CSV (freq_hz,S); a JSON sidecar is written next to it.")
def spectrum(config_path, which, out_path):
    """Full pipeline: reduce, build the laser model, write its spectrum."""
    data = _load_config(config_path)
    params = _reduce(_six_level_config(data))
    if which == "two":
        model = two_level_laser_model(params, _laser_config(data))
    else:
        model = six_level_laser_model(_six_level_config(data),
                                      _laser_config(data))
    try:
        result = laser_spectrum(model)
    except _NUMERICAL_ERRORS as exc:
        raise NumericalError(str(exc))
    with open(out_path, "w") as f:
        f.write("freq_hz,S\n")
        for w, s in zip(result.freq, result.S):
            f.write(f"{_fmt(w / TWOPI)},{_fmt(s)}\n")
    _sidecar(out_path, data, {
        "command": "spectrum",
        "model": which,
        "fwhm_hz": result.fwhm / TWOPI,
        "delta_p_hz": result.delta_p / TWOPI,
        "n": result.n,
        "window_s": float(result.metadata.get("tau_max", float("nan"))),
        "converged": bool(result.window_ok),
        "reduction_hz": params.as_hz_dict(),
    })
    click.echo(out_path)


@main.command("laser-compare")
@click.option("--config", "config_path", type=click.Path(), default=None)
def laser_compare(config_path):
    """Run the two-level and six-level laser models; print relative differences."""
    data = _load_config(config_path)
    six_cfg = _six_level_config(data)
    laser_cfg = _laser_config(data)
    params = _reduce(six_cfg)
    try:
        two = laser_spectrum(two_level_laser_model(params, laser_cfg))
        six = laser_spectrum(six_level_laser_model(six_cfg, laser_cfg))
    except _NUMERICAL_ERRORS as exc:
        raise NumericalError(str(exc))
    report = {
        "two_level": {"fwhm_hz": two.fwhm / TWOPI,
                      "delta_p_hz": two.delta_p / TWOPI, "n": two.n},
        "six_level": {"fwhm_hz": six.fwhm / TWOPI,
                      "delta_p_hz": six.delta_p / TWOPI, "n": six.n},
        "relative_difference": {
            "fwhm": abs(two.fwhm - six.fwhm) / abs(six.fwhm),
            "delta_p": abs(two.delta_p - six.delta_p) / abs(six.delta_p),
            "n": abs(two.n - six.n) / abs(six.n),
        },
    }
    click.echo(json.dumps(report, indent=2))


@main.command("dump-equations")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--model", "which", type=click.Choice(["two", "six"]),
              default="two", show_default=True,
              help="Dump the effective two-level or the full six-level system.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write to a file instead of stdout.")
def dump_equations(config_path, which, out_path):
    """Write the derived moment equations as sorted plain text (golden files)."""
    data = _load_config(config_path)
    six_cfg = _six_level_config(data)
    laser_cfg = _laser_config(data)
    if which == "two":
        model = two_level_laser_model(_reduce(six_cfg), laser_cfg)
    else:
        model = six_level_laser_model(six_cfg, laser_cfg)
    text = build_moment_system(model).dump()
    if out_path is None:
        click.echo(text)
    else:
        with open(out_path, "w") as f:
            f.write(text)
        click.echo(out_path)


if __name__ == "__main__":
    main()
