"""Reduction of a pumped multilevel atom to an incoherently pumped two-level one.

The pump rate comes from the steady-state population ratio,
R = Gamma_12 <sigma_22>/<sigma_11>, and the level shifts / dephasing rates
from the complex eigenvalues of the non-Hermitian Hamiltonian
H - (i/2) sum_j R_j J_j+ J_j, matching eigenvectors to the bare clock states
by largest squared overlap.

The analytic three-level elimination (both the perturbative formulas and
the exact eigenvalue expression) is included as an independent oracle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .levels import LevelScheme, build_hamiltonian, expect, liouvillian_for, sigma, steady_state_dm


class ReductionValidityWarning(UserWarning):
    """The elimination assumptions look violated (negative dephasing rate)."""


class EigenvectorAmbiguityError(RuntimeError):
    """Clock-eigenvector matching could not pick distinct / unique vectors."""


@dataclass(frozen=True)
class EffectiveTwoLevelParams:
    """Effective incoherently pumped two-level system, all rates in rad/s."""

    R: float
    delta1: float
    delta2: float
    nu1: float
    nu2: float
    gamma12: float

    @property
    def nu(self) -> float:
        return self.nu1 + self.nu2

    @property
    def delta21(self) -> float:
        return self.delta2 - self.delta1

    def as_hz_dict(self) -> dict:
        """Plain-Hz view for user-facing output."""
        twopi = 2 * np.pi
        return {
            "R_hz": self.R / twopi,
            "delta1_hz": self.delta1 / twopi,
            "delta2_hz": self.delta2 / twopi,
            "nu1_hz": self.nu1 / twopi,
            "nu2_hz": self.nu2 / twopi,
            "nu_hz": self.nu / twopi,
            "gamma12_hz": self.gamma12 / twopi,
        }


@dataclass(frozen=True)
class EigenPair:
    """Matched complex clock-state energies and their squared overlaps."""

    E1: complex
    E2: complex
    overlap1: float
    overlap2: float


@dataclass(frozen=True)
class ThreeLevelConfig:
    """Coherently pumped three-level atom (rates in rad/s).

    Level |3> is the fast intermediate state coupled to |1> with Rabi
    frequency Omega at detuning Delta3; Delta2 is a fixed shift of |2>.
    """

    Omega: float
    Delta2: float
    Delta3: float
    Gamma12: float
    Gamma13: float
    Gamma23: float
    nu1_0: float = 0.0
    nu2_0: float = 0.0
    nu3_0: float = 0.0

    @property
    def Gamma3(self) -> float:
        return self.Gamma13 + self.Gamma23

    @property
    def GammaPrime(self) -> float:
        return 0.5 * (self.Gamma3 + self.nu3_0)

    @property
    def perturbative(self) -> bool:
        gp = self.GammaPrime
        return gp > 0 and self.Omega < 0.1 * gp and self.nu1_0 < 0.1 * gp


def effective_nonhermitian(scheme: LevelScheme) -> np.ndarray:
    """Non-Hermitian Hamiltonian H - (i/2) sum_j R_j J_j+ J_j."""
    h = build_hamiltonian(scheme).astype(complex)
    for jp in scheme.jumps:
        j = jp.matrix(scheme.dim)
        h -= 0.5j * jp.rate * (j.conj().T @ j)
    return h


def match_clock_eigenvalues(
    hnh: np.ndarray,
    ground_index: int = 1,
    excited_index: int = 2,
    tie_tol: float = 1e-6,
) -> EigenPair:
    """Eigenvalues whose right eigenvectors best overlap the bare clock states."""
    evals, evecs = np.linalg.eig(hnh)
    norms = np.sum(np.abs(evecs) ** 2, axis=0)
    picks = []
    for idx in (ground_index - 1, excited_index - 1):
        ov = np.abs(evecs[idx, :]) ** 2 / norms
        order = np.argsort(ov)[::-1]
        if len(order) > 1 and ov[order[0]] - ov[order[1]] < tie_tol:
            raise EigenvectorAmbiguityError(
                f"near-degenerate overlaps for bare level {idx + 1}: "
                f"{ov[order[0]]:.8f} vs {ov[order[1]]:.8f} "
                f"(eigenvalues {evals[order[0]]:.6g}, {evals[order[1]]:.6g})"
            )
        picks.append((order[0], ov[order[0]]))
    (k1, ov1), (k2, ov2) = picks
    if k1 == k2:
        raise EigenvectorAmbiguityError(
            "the same eigenvector matched both clock states"
        )
    return EigenPair(E1=complex(evals[k1]), E2=complex(evals[k2]),
                     overlap1=float(ov1), overlap2=float(ov2))


def reduce_scheme(
    scheme: LevelScheme,
    ground_index: int = 1,
    excited_index: int = 2,
    gamma12: float = None,
) -> EffectiveTwoLevelParams:
    """Map a pumped multilevel scheme onto EffectiveTwoLevelParams.

    gamma12 defaults to the rate of the scheme's sigma_{ground,excited}
    decay jump.  Emits ReductionValidityWarning when a dephasing rate comes
    out negative beyond -1e-9 of the dominant rate scale.
    """
    if gamma12 is None:
        gamma12 = _find_clock_decay(scheme, ground_index, excited_index)
    rho = steady_state_dm(liouvillian_for(scheme))
    p1 = expect(rho, sigma(scheme.dim, ground_index, ground_index)).real
    p2 = expect(rho, sigma(scheme.dim, excited_index, excited_index)).real
    if p1 < 1e-12:
        raise ZeroDivisionError(
            f"ground-state population {p1:.3e} too small for a pump-rate ratio"
        )
    pump = gamma12 * p2 / p1
    pair = match_clock_eigenvalues(effective_nonhermitian(scheme),
                                   ground_index, excited_index)
    nu1 = -2.0 * pair.E1.imag - pump
    nu2 = -2.0 * pair.E2.imag - gamma12
    scale = max(abs(r) for r in (pump, gamma12, 1.0))
    if nu1 < -1e-9 * scale or nu2 < -1e-9 * scale:
        warnings.warn(
            f"negative dephasing rate (nu1={nu1:.3e}, nu2={nu2:.3e}); "
            "the two-level reduction is outside its regime of validity",
            ReductionValidityWarning,
        )
    return EffectiveTwoLevelParams(
        R=pump, delta1=pair.E1.real, delta2=pair.E2.real,
        nu1=nu1, nu2=nu2, gamma12=gamma12,
    )


def _find_clock_decay(scheme, ground_index, excited_index):
    for jp in scheme.jumps:
        if len(jp.terms) == 1:
            w, (i, j) = jp.terms[0]
            if (i, j) == (ground_index, excited_index) and w == 1.0:
                return jp.rate
    raise ValueError(
        "no sigma_{ground,excited} decay jump found; pass gamma12 explicitly"
    )


def analytic_three_level(cfg: ThreeLevelConfig) -> EffectiveTwoLevelParams:
    """Perturbative adiabatic elimination of level |3> (closed formulas).

    Valid for Omega, nu1_0 << GammaPrime.  delta2 equals Delta2 and
    nu2 = nu2_0 exactly in this scheme.
    """
    gp = cfg.GammaPrime
    if gp <= 0:
        raise ValueError("GammaPrime must be positive")
    lor = 1.0 / (gp**2 + cfg.Delta3**2)
    pump = (cfg.Gamma23 / cfg.Gamma3) * 2.0 * cfg.Omega**2 * gp * lor
    nu1 = cfg.nu1_0 + (cfg.Gamma13 / cfg.Gamma3) * 2.0 * cfg.Omega**2 * gp * lor
    delta1 = -cfg.Omega**2 * cfg.Delta3 * lor
    return EffectiveTwoLevelParams(
        R=pump, delta1=delta1, delta2=cfg.Delta2,
        nu1=nu1, nu2=cfg.nu2_0, gamma12=cfg.Gamma12,
    )


def exact_three_level_eigenvalues(cfg: ThreeLevelConfig):
    """Exact complex energies E1, E3 of the 1-3 block (test-only reference).

    E_{1,3} = (Delta3 - i G')/2 * (1 -/+ sqrt(1 + (4 Omega^2
    + 2 i nu1_0 (Delta3 - i G')) / (Delta3 - i G')^2)), neglecting
    Gamma12, nu2_0 against G'.
    """
    z = cfg.Delta3 - 1j * cfg.GammaPrime
    root = np.sqrt(1.0 + (4.0 * cfg.Omega**2 + 2j * cfg.nu1_0 * z) / z**2)
    e1 = 0.5 * z * (1.0 - root)
    e3 = 0.5 * z * (1.0 + root)
    return complex(e1), complex(e3)
