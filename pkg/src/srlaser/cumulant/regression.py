"""Two-time correlation dynamics via the quantum regression theorem.

The right-hand operators evolve under the same Heisenberg equations as the
one-time moments; ``a_dag(0)`` rides along as an opaque left factor Z.  The
second-order closure of <Z x y> is

    <Z x y> ~ <Z x><y>ss + <Z y><x>ss + <x y>ss <Z>ss - 2 <Z>ss <x>ss <y>ss

so the correlation vector y_u(tau) = <a_dag(0) u(tau)> obeys a linear
constant-coefficient ODE dy/dtau = M y + b with coefficients evaluated at
the one-time steady state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Coeff, Monomial, mono_a, mono_adag, mono_mul, mono_sigma, unit_factors
from .system import SymbolicLaserModel, heisenberg_rhs


class NotConvergedError(ValueError):
    """The supplied state is not a converged steady state."""


def _slot1(m: Monomial) -> Monomial:
    """Relabel a single-atom monomial onto slot 1 (atoms are identical)."""
    if not m.atoms:
        return m
    (_, op), = m.atoms
    return Monomial(ndag=m.ndag, n=m.n, atoms=((1, op),))


@dataclass
class RegressionSystem:
    """dy/dtau = matrix @ y + source, y_u(0) = <a_dag u>ss."""

    matrix: np.ndarray          # (ny, ny) complex
    source: np.ndarray          # (ny,) complex
    y0: np.ndarray              # (ny,) complex
    units: list                 # tracked right-hand operators (Monomial)
    index: dict                 # Monomial -> row

    @property
    def field_row(self) -> int:
        return self.index[mono_a()]


def build_regression_system(compiled, steady) -> RegressionSystem:
    """Linear correlation dynamics of a laser model around its steady state.

    ``compiled`` is the CompiledSystem of the one-time moment equations and
    ``steady`` the MomentState found for it; the state must be converged.
    """
    if not steady.converged:
        raise NotConvergedError(
            f"steady state not converged (residual {steady.residual:.3e})")
    x_ss = steady.x
    sym = compiled.system.sym
    bindings = compiled.bindings

    units = [mono_a(), mono_adag()]
    units += [mono_sigma(i, j) for i in range(1, sym.dim + 1)
              for j in range(1, sym.dim + 1)]
    index = {u: k for k, u in enumerate(units)}
    ny = len(units)

    def ss(monomial) -> complex:
        return compiled.moment_value(x_ss, monomial)

    z_ss = ss(mono_a()).conjugate()        # <a_dag>ss

    matrix = np.zeros((ny, ny), dtype=complex)
    source = np.zeros(ny, dtype=complex)
    for row, u in enumerate(units):
        rhs = heisenberg_rhs(sym, {u: 1})
        for mono, coeff in rhs.items():
            c = coeff.evaluate(bindings) if isinstance(coeff, Coeff) else complex(coeff)
            if c == 0:
                continue
            order = mono.order
            if order == 0:
                source[row] += c * z_ss
            elif order == 1:
                matrix[row, index[_slot1(mono)]] += c
            elif order == 2:
                v, w = (_slot1(f) for f in unit_factors(mono))
                matrix[row, index[v]] += c * ss(w)
                matrix[row, index[w]] += c * ss(v)
                source[row] += c * z_ss * (ss(mono) - 2.0 * ss(v) * ss(w))
            else:
                raise ValueError(
                    f"order-{order} operator in correlation dynamics: {mono}")

    y0 = np.empty(ny, dtype=complex)
    for k, u in enumerate(units):
        (prod,) = mono_mul(mono_adag(), u)
        y0[k] = ss(prod)
    return RegressionSystem(matrix=matrix, source=source, y0=y0,
                            units=units, index=index)
