"""Dense matrix representation of driven, dissipative few-level atoms.

Everything here works on small (dim <= ~8) Hilbert spaces with plain numpy
arrays.  Frequencies are angular (rad/s) throughout, with hbar = 1; the
config layer converts from ordinary Hz at the boundary.

Superoperators act on column-stacked density matrices: ``vec(rho)`` stacks
the columns of ``rho`` (Fortran order), so ``vec(A @ rho @ B) =
kron(B.T, A) @ vec(rho)``.  All tests pin this convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp


class SchemeError(ValueError):
    """A level scheme or operator is structurally invalid."""


class DegenerateSteadyStateError(RuntimeError):
    """The Liouvillian kernel is not one-dimensional."""

    def __init__(self, kernel_dim):
        self.kernel_dim = kernel_dim
        super().__init__(
            f"steady state is not unique: kernel dimension {kernel_dim} "
            "(disconnected level or missing decay channel?)"
        )


class StiffnessError(RuntimeError):
    """Time integration failed; the system is too stiff for evolve_dm."""


def sigma(dim: int, i: int, j: int) -> np.ndarray:
    """Transition operator |i><j| as a dense matrix (1-based indices)."""
    if not (1 <= i <= dim and 1 <= j <= dim):
        raise SchemeError(f"transition ({i},{j}) out of range for dim={dim}")
    m = np.zeros((dim, dim), dtype=complex)
    m[i - 1, j - 1] = 1.0
    return m


@dataclass(frozen=True)
class JumpProcess:
    """A Lindblad jump operator: weighted sum of |i><j| terms with a rate.

    ``terms`` is a tuple of ``(weight, (i, j))``; composite dephasing jumps
    such as sigma_33 + sigma_44 + sigma_55 are a single JumpProcess with
    several unit-weight terms.
    """

    terms: tuple
    rate: float
    description: str = ""

    def __post_init__(self):
        if self.rate < 0:
            raise SchemeError(f"negative jump rate {self.rate} ({self.description})")
        if len(self.terms) == 0:
            raise SchemeError("jump operator has no terms")

    def matrix(self, dim: int) -> np.ndarray:
        m = np.zeros((dim, dim), dtype=complex)
        for w, (i, j) in self.terms:
            m += w * sigma(dim, i, j)
        return m


def jump(i: int, j: int, rate: float, description: str = "") -> JumpProcess:
    """Single-transition jump sigma_ij with the given rate."""
    return JumpProcess(terms=((1.0, (i, j)),), rate=rate, description=description)


@dataclass(frozen=True)
class LevelScheme:
    """A driven, dissipative n-level atom.

    diagonal[k] multiplies sigma_{k+1,k+1} in the Hamiltonian; each coupling
    ``(i, j, Omega)`` contributes ``Omega * (sigma_ij + sigma_ji)``.
    """

    dim: int
    diagonal: tuple
    couplings: tuple = ()
    jumps: tuple = ()
    labels: tuple = field(default=())

    def __post_init__(self):
        if len(self.diagonal) != self.dim:
            raise SchemeError("diagonal length must equal dim")
        for i, j, omega in self.couplings:
            if i == j:
                raise SchemeError(f"coupling ({i},{j}) must connect distinct levels")
            if not (1 <= i <= self.dim and 1 <= j <= self.dim):
                raise SchemeError(f"coupling ({i},{j}) out of range")
            if abs(complex(omega).imag) > 0:
                raise SchemeError("Rabi couplings must be real")
        for jp in self.jumps:
            for _, (i, j) in jp.terms:
                if not (1 <= i <= self.dim and 1 <= j <= self.dim):
                    raise SchemeError(f"jump index ({i},{j}) out of range")


def build_hamiltonian(scheme: LevelScheme) -> np.ndarray:
    """Hermitian Hamiltonian of the scheme in rad/s (hbar = 1)."""
    h = np.diag(np.asarray(scheme.diagonal, dtype=complex))
    for i, j, omega in scheme.couplings:
        h += omega * (sigma(scheme.dim, i, j) + sigma(scheme.dim, j, i))
    return h


def build_liouvillian(h: np.ndarray, jumps: tuple) -> np.ndarray:
    """Schroedinger-picture generator of drho/dt as a dim^2 x dim^2 matrix.

    L vec(rho) = vec(-i[H, rho] + sum_j R_j (J rho J+ - {J+ J, rho}/2)).
    """
    d = h.shape[0]
    if h.shape != (d, d):
        raise SchemeError("Hamiltonian must be square")
    eye = np.eye(d)
    liouv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for jp in jumps:
        j = jp.matrix(d) if isinstance(jp, JumpProcess) else np.asarray(jp[0])
        rate = jp.rate if isinstance(jp, JumpProcess) else jp[1]
        jdj = j.conj().T @ j
        liouv += rate * (
            np.kron(j.conj(), j)
            - 0.5 * np.kron(eye, jdj)
            - 0.5 * np.kron(jdj.T, eye)
        )
    return liouv


def liouvillian_for(scheme: LevelScheme) -> np.ndarray:
    """Convenience: Liouvillian of a scheme's Hamiltonian and jumps."""
    return build_liouvillian(build_hamiltonian(scheme), scheme.jumps)


def _unvec(v: np.ndarray, d: int) -> np.ndarray:
    return v.reshape((d, d), order="F")


def steady_state_dm(liouv: np.ndarray, kernel_rtol: float = 1e-13) -> np.ndarray:
    """Unique steady-state density matrix from the kernel of L.

    Dense SVD kernel extraction followed by trace normalization.  Raises
    DegenerateSteadyStateError when the numerical kernel is not
    one-dimensional.  The default tolerance sits well below the slowest
    physical rates in scope (mHz against MHz) but above roundoff.
    """
    n = liouv.shape[0]
    d = int(round(np.sqrt(n)))
    _, s, vh = np.linalg.svd(liouv)
    smax = s[0] if s[0] > 0 else 1.0
    kernel = np.sum(s <= kernel_rtol * smax)
    if kernel != 1:
        raise DegenerateSteadyStateError(int(kernel))
    rho = _unvec(vh[-1].conj(), d)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-14:
        raise DegenerateSteadyStateError(1)  # traceless kernel vector
    rho = rho / tr
    # kernel vector fixed only up to phase; hermitization + positive trace
    # resolves it, but guard against a grossly non-physical result
    if np.linalg.eigvalsh(rho).min() < -1e-8:
        raise RuntimeError("steady-state solve produced a non-positive matrix")
    return rho


def evolve_dm(
    liouv: np.ndarray,
    rho0: np.ndarray,
    t_end: float,
    tol: float = 1e-10,
) -> np.ndarray:
    """Integrate drho/dt = L rho from rho0 to t_end (adaptive, stiff-capable)."""
    d = rho0.shape[0]
    if liouv.shape[0] != d * d:
        raise SchemeError("dimension mismatch between L and rho0")
    if t_end == 0:
        return rho0.copy()
    y0 = rho0.reshape(-1, order="F")
    sol = solve_ivp(
        lambda _t, y: liouv @ y,
        (0.0, t_end),
        y0,
        method="BDF",
        jac=lambda _t, _y: liouv,
        rtol=tol,
        atol=tol,
    )
    if not sol.success:
        raise StiffnessError(
            f"integration failed ({sol.message}); consider steady_state_dm"
        )
    rho = _unvec(sol.y[:, -1], d)
    rho = 0.5 * (rho + rho.conj().T)
    drift = abs(np.trace(rho).real - np.trace(rho0).real)
    if drift > 10 * max(tol, 1e-13) * 100:
        raise StiffnessError(f"trace drifted by {drift:.3e} during integration")
    return rho


def expect(rho: np.ndarray, operator: np.ndarray) -> complex:
    """Expectation value trace(O rho)."""
    if rho.shape != operator.shape:
        raise SchemeError("dimension mismatch between rho and operator")
    return complex(np.trace(operator @ rho))


def check_density_matrix(rho: np.ndarray, htol=1e-12, ttol=1e-10, ptol=1e-10):
    """Validate hermiticity, unit trace and positivity; raises on failure."""
    if np.abs(rho - rho.conj().T).max() > htol:
        raise SchemeError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > ttol:
        raise SchemeError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho).min() < -ptol:
        raise SchemeError("density matrix has a negative eigenvalue")
