"""Concrete scheme builders for the 88Sr six-level pump and the laser models.

User-facing configs carry ordinary frequencies in Hz; conversion to angular
frequencies happens here, at the boundary.  The shipped defaults live in
``data/sr88_defaults.toml`` together with their provenance.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from math import pi

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .levels import JumpProcess, LevelScheme, jump
from .reduction import EffectiveTwoLevelParams, ThreeLevelConfig

TWOPI = 2 * pi


def load_defaults() -> dict:
    """Parsed contents of the shipped sr88_defaults.toml (plain Hz)."""
    with resources.files("srlaser.data").joinpath("sr88_defaults.toml").open("rb") as f:
        return tomllib.load(f)


@dataclass(frozen=True)
class SixLevelConfig:
    """Six-level pump scheme parameters, all in ordinary Hz.

    Levels: |1> 1S0, |2> 3P0, |3> 3P1(m=-1), |4> 3S1(m=0),
    |5> 3P2(combined), |6> 3P1(m=+1).
    """

    Omega13: float
    Omega34: float
    Omega54: float
    Delta13: float
    Delta34: float
    Delta54: float
    Gamma12: float
    Gamma13: float
    Gamma34: float
    Gamma24: float
    Gamma54: float
    Gamma64: float
    Gamma16: float
    nu12: float
    nu13: float
    nu34: float
    nu54: float

    def __post_init__(self):
        for name in ("Gamma12", "Gamma13", "Gamma34", "Gamma24", "Gamma54",
                     "Gamma64", "Gamma16", "nu12", "nu13", "nu34", "nu54"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.Gamma12 <= 0:
            raise ValueError("Gamma12 must be positive")

    @classmethod
    def standard(cls, **overrides) -> "SixLevelConfig":
        """Shipped defaults (standard operating point), with overrides in Hz."""
        d = load_defaults()
        kw = dict(
            **d["pump"],
            Gamma12=d["decay"]["Gamma12"],
            Gamma13=d["decay"]["Gamma13"],
            Gamma34=d["decay"]["Gamma34"],
            Gamma24=d["decay"]["Gamma24"],
            Gamma54=d["decay"]["Gamma54"],
            Gamma64=d["decay"]["Gamma64"],
            Gamma16=d["decay"]["Gamma16"],
            nu12=d["dephasing"]["nu12"],
            nu13=d["dephasing"]["nu13"],
            nu34=d["dephasing"]["nu34"],
            nu54=d["dephasing"]["nu54"],
        )
        kw.update(overrides)
        return cls(**kw)

    def replace(self, **overrides) -> "SixLevelConfig":
        return replace(self, **overrides)


@dataclass(frozen=True)
class LaserConfig:
    """Cavity and ensemble parameters in ordinary Hz (except N)."""

    N: int
    g: float
    kappa: float
    eta: float
    DeltaC: float = 0.0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")

    @classmethod
    def standard(cls, **overrides) -> "LaserConfig":
        kw = dict(load_defaults()["cavity"])
        kw.update(overrides)
        kw["N"] = int(kw["N"])
        return cls(**kw)


@dataclass(frozen=True)
class LaserModel:
    """N identical atoms (scheme) coupled to one cavity mode (rad/s)."""

    scheme: LevelScheme
    N: int
    g: float
    kappa: float
    eta: float
    delta_c: float
    coupling: tuple = (1, 2)

    def __post_init__(self):
        gnd, exc = self.coupling
        if not (1 <= gnd <= self.scheme.dim and 1 <= exc <= self.scheme.dim):
            raise ValueError("coupling transition outside the scheme")


def six_level_scheme(cfg: SixLevelConfig) -> LevelScheme:
    """The 88Sr six-level pump scheme as a LevelScheme (rad/s)."""
    d3 = TWOPI * cfg.Delta13
    d4 = d3 + TWOPI * cfg.Delta34
    d5 = d4 - TWOPI * cfg.Delta54
    jumps = (
        jump(1, 2, TWOPI * cfg.Gamma12, "decay |2> -> |1>"),
        jump(1, 3, TWOPI * cfg.Gamma13, "decay |3> -> |1>"),
        jump(3, 4, TWOPI * cfg.Gamma34, "decay |4> -> |3>"),
        jump(2, 4, TWOPI * cfg.Gamma24, "decay |4> -> |2>"),
        jump(5, 4, TWOPI * cfg.Gamma54, "decay |4> -> |5>"),
        jump(6, 4, TWOPI * cfg.Gamma64, "decay |4> -> |6>"),
        jump(1, 6, TWOPI * cfg.Gamma16, "decay |6> -> |1>"),
        jump(2, 2, TWOPI * cfg.nu12, "clock dephasing"),
        JumpProcess(
            terms=((1.0, (3, 3)), (1.0, (4, 4)), (1.0, (5, 5))),
            rate=TWOPI * cfg.nu13, description="pump linewidth 1-3",
        ),
        JumpProcess(
            terms=((1.0, (4, 4)), (1.0, (5, 5))),
            rate=TWOPI * cfg.nu34, description="pump linewidth 3-4",
        ),
        jump(5, 5, TWOPI * cfg.nu54, "pump linewidth 4-5"),
    )
    return LevelScheme(
        dim=6,
        diagonal=(0.0, 0.0, -d3, -d4, -d5, 0.0),
        couplings=(
            (1, 3, TWOPI * cfg.Omega13),
            (3, 4, TWOPI * cfg.Omega34),
            (5, 4, TWOPI * cfg.Omega54),
        ),
        jumps=jumps,
        labels=("1S0", "3P0", "3P1m-1", "3S1m0", "3P2", "3P1m+1"),
    )


def three_level_scheme(cfg: ThreeLevelConfig) -> LevelScheme:
    """Three-level scheme of the analytic elimination benchmark (rad/s in, rad/s out)."""
    return LevelScheme(
        dim=3,
        diagonal=(0.0, cfg.Delta2, cfg.Delta3),
        couplings=((1, 3, cfg.Omega),),
        jumps=(
            jump(1, 2, cfg.Gamma12, "decay |2> -> |1>"),
            jump(1, 3, cfg.Gamma13, "decay |3> -> |1>"),
            jump(2, 3, cfg.Gamma23, "decay |3> -> |2>"),
            jump(1, 1, cfg.nu1_0, "dephasing on |1>"),
            jump(2, 2, cfg.nu2_0, "dephasing on |2>"),
            jump(3, 3, cfg.nu3_0, "dephasing on |3>"),
        ),
        labels=("1", "2", "3"),
    )


def two_level_scheme(p: EffectiveTwoLevelParams) -> LevelScheme:
    """Effective two-level atom with incoherent pump (diagonal shift -delta1 on |2>).

    In the rotating frame of the unperturbed clock transition the reduced
    Hamiltonian is -delta1 * sigma_22 per atom (only the ground state is
    shifted by the pump lasers; a global shift of delta1 is dropped).
    """
    return LevelScheme(
        dim=2,
        diagonal=(0.0, -p.delta1),
        couplings=(),
        jumps=(
            jump(1, 2, p.gamma12, "clock decay"),
            jump(2, 1, p.R, "incoherent pump"),
            jump(1, 1, p.nu1, "dephasing on |1>"),
            jump(2, 2, p.nu2, "dephasing on |2>"),
        ),
        labels=("1", "2"),
    )


def two_level_laser_model(p: EffectiveTwoLevelParams, c: LaserConfig) -> LaserModel:
    """Effective two-level lasing model (homogeneous ensemble)."""
    return LaserModel(
        scheme=two_level_scheme(p),
        N=c.N, g=TWOPI * c.g, kappa=TWOPI * c.kappa, eta=TWOPI * c.eta,
        delta_c=TWOPI * c.DeltaC, coupling=(1, 2),
    )


def six_level_laser_model(cfg: SixLevelConfig, c: LaserConfig) -> LaserModel:
    """Full six-level lasing model, cavity coupled on |1> <-> |2>."""
    return LaserModel(
        scheme=six_level_scheme(cfg),
        N=c.N, g=TWOPI * c.g, kappa=TWOPI * c.kappa, eta=TWOPI * c.eta,
        delta_c=TWOPI * c.DeltaC, coupling=(1, 2),
    )


def dephasing_estimate(pump_rate: float, cfg: SixLevelConfig) -> float:
    """Quick estimate nu ~ R * Gamma64/Gamma24 + nu12 (rad/s in, rad/s out).

    The dominant pump-induced dephasing path is |4> -> |6> -> |1>; its
    branching relative to the lasing decay |4> -> |2> sets the prefactor.
    """
    if cfg.Gamma24 == 0:
        raise ZeroDivisionError("Gamma24 must be positive for the estimate")
    return pump_rate * cfg.Gamma64 / cfg.Gamma24 + TWOPI * cfg.nu12
