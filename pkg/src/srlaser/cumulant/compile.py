"""Numeric compilation of symbolic moment systems.

Stored variables are the deduplicated complex moments; evaluation works on
an expanded vector ``w`` with ``w[2i] = z_i`` and ``w[2i+1] = conj(z_i)`` so
every polynomial term is a plain product of ``w`` entries.  The public
interface is a packed real state vector: self-conjugate moments occupy one
slot, all others two (real, imaginary).  Jacobians are exact, obtained by
differentiating the term lists in ``w`` and mapping through z = x_re + i x_im.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Coeff


class MissingBindingError(KeyError):
    """A parameter has no numeric value."""


def _evaluate_coefficients(coeffs, bindings) -> np.ndarray:
    """Evaluate a list of parameter linear combinations to complex numbers."""
    out = np.empty(len(coeffs), dtype=complex)
    for k, c in enumerate(coeffs):
        if isinstance(c, Coeff):
            missing = c.params - set(bindings)
            if missing:
                raise MissingBindingError(
                    f"no value bound for parameter(s) {sorted(missing)}")
            out[k] = c.evaluate(bindings)
        else:
            out[k] = complex(c)
    return out


@dataclass
class CompiledSystem:
    """Vectorized right-hand side and Jacobian of a closed moment system."""

    system: object                  # MomentSystem
    bindings: dict
    n_complex: int
    n_real: int
    is_real: np.ndarray             # (n_complex,) bool
    real_offset: np.ndarray         # (n_complex,) first packed slot of each moment
    # per polynomial degree d in 0..3: (coeff, row) plus d column-index arrays
    terms: dict

    # -- packing ---------------------------------------------------------------

    def pack(self, z: np.ndarray) -> np.ndarray:
        x = np.empty(self.n_real)
        off = self.real_offset
        x[off[self.is_real]] = z[self.is_real].real
        cplx = ~self.is_real
        x[off[cplx]] = z[cplx].real
        x[off[cplx] + 1] = z[cplx].imag
        return x

    def unpack(self, x: np.ndarray) -> np.ndarray:
        z = np.empty(self.n_complex, dtype=complex)
        off = self.real_offset
        z[self.is_real] = x[off[self.is_real]]
        cplx = ~self.is_real
        z[cplx] = x[off[cplx]] + 1j * x[off[cplx] + 1]
        return z

    def expand(self, z: np.ndarray) -> np.ndarray:
        w = np.empty(2 * self.n_complex, dtype=complex)
        w[0::2] = z
        w[1::2] = z.conj()
        return w

    # -- evaluation --------------------------------------------------------------

    def rhs_complex(self, z: np.ndarray) -> np.ndarray:
        w = self.expand(z)
        f = np.zeros(self.n_complex, dtype=complex)
        for deg, (coeff, row, cols) in self.terms.items():
            vals = coeff.copy()
            for c in cols:
                vals *= w[c]
            np.add.at(f, row, vals)
        return f

    def rhs_real(self, x: np.ndarray) -> np.ndarray:
        f = self.rhs_complex(self.unpack(x))
        return self.pack(f)

    def _wirtinger(self, z: np.ndarray) -> np.ndarray:
        """dF/dw as a dense (n_complex, 2 n_complex) complex matrix."""
        w = self.expand(z)
        a = np.zeros((self.n_complex, 2 * self.n_complex), dtype=complex)
        for deg, (coeff, row, cols) in self.terms.items():
            for k in range(deg):
                vals = coeff.copy()
                for m in range(deg):
                    if m != k:
                        vals *= w[cols[m]]
                np.add.at(a, (row, cols[k]), vals)
        return a

    def jac_real(self, x: np.ndarray) -> np.ndarray:
        a = self._wirtinger(self.unpack(x))
        dz = a[:, 0::2]
        dzc = a[:, 1::2]
        # z_j = x_re + i x_im, conj(z_j) = x_re - i x_im
        d_re = dz + dzc
        d_im = 1j * (dz - dzc)
        cplx_cols = np.zeros((self.n_complex, self.n_real), dtype=complex)
        off = self.real_offset
        cplx_cols[:, off] = d_re
        cplx = ~self.is_real
        cplx_cols[:, off[cplx] + 1] = d_im[:, cplx]
        jac = np.zeros((self.n_real, self.n_real))
        jac[off] = cplx_cols.real
        jac[off[cplx] + 1] = cplx_cols[cplx].imag
        return jac

    # -- conveniences --------------------------------------------------------------

    @property
    def moments(self):
        return self.system.variables

    def lookup(self, monomial):
        return self.system.lookup(monomial)

    def variable_index(self, monomial) -> tuple:
        """(packed slots, conj flag) of a moment, for reading packed states."""
        idx, conj = self.system.lookup(monomial)
        off = int(self.real_offset[idx])
        slots = (off,) if self.is_real[idx] else (off, off + 1)
        return slots, conj

    def moment_value(self, x: np.ndarray, monomial) -> complex:
        slots, conj = self.variable_index(monomial)
        val = x[slots[0]] + (1j * x[slots[1]] if len(slots) == 2 else 0.0)
        return val.conjugate() if conj else val


def compile_system(system, overrides: dict | None = None) -> CompiledSystem:
    """Freeze a MomentSystem into numeric term lists.

    ``overrides`` replaces entries of the system's default parameter values
    by name; unknown names are rejected.
    """
    bindings = dict(system.sym.bindings)
    if overrides:
        unknown = set(overrides) - set(bindings)
        if unknown:
            raise MissingBindingError(f"unknown parameter(s) {sorted(unknown)}")
        bindings.update(overrides)

    n = len(system.variables)
    index = system.index
    is_real = np.array([m.is_real for m in system.variables], dtype=bool)
    sizes = np.where(is_real, 1, 2)
    real_offset = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    n_real = int(sizes.sum())

    by_deg = {d: {"coeff": [], "row": [], "cols": [[] for _ in range(d)]}
              for d in range(4)}
    for row, eq in enumerate(system.equations):
        for coeff, factors in eq:
            d = len(factors)
            bucket = by_deg[d]
            bucket["coeff"].append(coeff)
            bucket["row"].append(row)
            for k, (mom, conj) in enumerate(factors):
                bucket["cols"][k].append(2 * index[mom] + (1 if conj else 0))

    terms = {}
    for d, bucket in by_deg.items():
        if not bucket["coeff"]:
            continue
        coeff = _evaluate_coefficients(bucket["coeff"], bindings)
        row = np.array(bucket["row"], dtype=np.intp)
        cols = tuple(np.array(c, dtype=np.intp) for c in bucket["cols"])
        terms[d] = (coeff, row, cols)

    return CompiledSystem(system=system, bindings=bindings, n_complex=n,
                          n_real=n_real, is_real=is_real,
                          real_offset=real_offset, terms=terms)
