"""Second-order cumulant moment systems for N identical atoms and one mode.

Equations are derived symbolically for one representative atom (slot 1) and
one representative distinct pair (slots 1, 2); sums over the remaining
atoms appear as explicit (N - m) multiplicities, so the equation count is
independent of N.  Coefficients stay linear combinations of the model
parameters, and the numeric bindings extracted from the model travel with
the system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..sr88 import LaserModel
from .algebra import (
    Coeff,
    Moment,
    Monomial,
    canonical_moment,
    close_expression,
    commutator,
    dissipator_heisenberg,
    expr_iadd,
    expr_scale,
    mono_a,
    mono_sigma,
)


class ClosureError(RuntimeError):
    """A moment variable was generated without an equation."""


@dataclass
class SymbolicLaserModel:
    """Parameter-symbol view of a LaserModel plus numeric bindings."""

    dim: int
    coupling: tuple
    bindings: dict                 # parameter name -> value
    diagonal_params: tuple         # one name per level
    coupling_terms: tuple          # ((i, j, name), ...)
    jump_terms: tuple              # ((rate_name, ((weight, (i, j)), ...)), ...)

    @classmethod
    def from_model(cls, model: LaserModel) -> "SymbolicLaserModel":
        scheme = model.scheme
        bindings = {}

        def bind(name, value):
            bindings[name] = float(value)
            return name

        diag = tuple(bind(f"h{k+1}", scheme.diagonal[k]) for k in range(scheme.dim))
        coup = tuple((i, j, bind(f"Omega{i}{j}", om))
                     for i, j, om in scheme.couplings)
        jumps = []
        for idx, jp in enumerate(scheme.jumps):
            if len(jp.terms) == 1 and jp.terms[0][0] == 1.0:
                i, j = jp.terms[0][1]
                rate = bind(f"r{i}{j}", jp.rate)
            else:
                rate = bind(f"rj{idx+1}", jp.rate)
            jumps.append((rate, tuple(jp.terms)))
        bind("g", model.g)
        bind("kappa", model.kappa)
        bind("Delta_c", model.delta_c)
        bind("eta", model.eta)
        bind("N", model.N)
        return cls(dim=scheme.dim, coupling=model.coupling, bindings=bindings,
                   diagonal_params=diag, coupling_terms=coup,
                   jump_terms=tuple(jumps))

    # -- operator pieces -------------------------------------------------------

    def h_cavity(self) -> dict:
        return {Monomial(ndag=1, n=1): Coeff.param("Delta_c", -1.0)}

    def h_atom(self, slot: int) -> dict:
        out = {}
        for k, name in enumerate(self.diagonal_params):
            expr_iadd(out, {mono_sigma(k + 1, k + 1, slot): Coeff.param(name)})
        for i, j, name in self.coupling_terms:
            om = Coeff.param(name)
            expr_iadd(out, {mono_sigma(i, j, slot): om,
                            mono_sigma(j, i, slot): om})
        gnd, exc = self.coupling
        g = Coeff.param("g")
        expr_iadd(out, {
            Monomial(ndag=1, atoms=((slot, (gnd, exc)),)): g,
            Monomial(n=1, atoms=((slot, (exc, gnd)),)): g,
        })
        return out

    def atom_jumps(self, slot: int):
        for rate, terms in self.jump_terms:
            yield Coeff.param(rate), {mono_sigma(i, j, slot): w
                                      for w, (i, j) in terms}

    def cavity_jumps(self):
        yield Coeff.param("kappa"), {mono_a(): 1}
        yield Coeff.param("eta"), {Monomial(ndag=1, n=1): 1}


def heisenberg_rhs(sym: SymbolicLaserModel, op: dict) -> dict:
    """d<op>/dt as an operator expression: i[H, op] + adjoint dissipators.

    Atoms outside the slots of ``op`` commute with everything in it except
    through the cavity coupling; their identical contributions enter once,
    on a fresh canonical slot, with multiplicity (N - #slots).
    """
    out = {}
    for mono, coeff in op.items():
        single = {mono: coeff}
        expr_iadd(out, commutator(sym.h_cavity(), single), scale=1j)
        for rate, j in sym.cavity_jumps():
            expr_iadd(out, dissipator_heisenberg(j, single), scale=rate)
        slots = mono.slots
        for s in slots:
            expr_iadd(out, commutator(sym.h_atom(s), single), scale=1j)
            for rate, j in sym.atom_jumps(s):
                expr_iadd(out, dissipator_heisenberg(j, single), scale=rate)
        fresh = (max(slots) if slots else 0) + 1
        rest = expr_scale(commutator(sym.h_atom(fresh), single), 1j)
        for rate, j in sym.atom_jumps(fresh):
            expr_iadd(rest, dissipator_heisenberg(j, single), scale=rate)
        expr_iadd(out, rest, scale=Coeff.n_minus(len(slots)))
    return out


@dataclass
class MomentSystem:
    """Closed set of moment variables and polynomial right-hand sides.

    ``equations[k]`` is a list of ``(coeff, factors)`` terms for
    d(variables[k])/dt, each factor a ``(Moment, conj_flag)`` pair;
    conjugate moments are stored once and referenced through the flag.
    """

    sym: SymbolicLaserModel
    variables: list
    equations: list
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {m: k for k, m in enumerate(self.variables)}

    def lookup(self, monomial: Monomial):
        """(variable index, conj flag) of an arbitrary moment monomial."""
        mom, conj = canonical_moment(monomial)
        return self.index[mom], conj

    @property
    def atom_dim(self) -> int:
        return self.sym.dim

    def dump(self) -> str:
        """Plain-text equation listing, one canonical equation per line."""
        import sympy as sp

        lines = []
        for mom, eq in zip(self.variables, self.equations):
            terms = []
            for coeff, factors in sorted(
                    eq, key=lambda t: tuple(f[0].label() for f in t[1])):
                fs = "*".join(
                    (f"conj({m.label()})" if cj else m.label()) for m, cj in factors
                )
                c = coeff.to_sympy() if isinstance(coeff, Coeff) else sp.nsimplify(coeff)
                terms.append(f"({sp.sstr(c)})" + (f"*{fs}" if fs else ""))
            lines.append(f"d{mom.label()}/dt = "
                         + (" + ".join(terms) if terms else "0"))
        return "\n".join(lines) + "\n"


def build_moment_system(model) -> MomentSystem:
    """Derive the closed second-order system for a LaserModel.

    Seeds are <a>, <ad*a> and every single-atom <sij>; everything else
    (cavity-atom moments, <a^2>, distinct-atom pairs) is discovered by
    breadth-first closure.
    """
    sym = (model if isinstance(model, SymbolicLaserModel)
           else SymbolicLaserModel.from_model(model))
    seeds = [mono_a(), Monomial(ndag=1, n=1)]
    seeds += [mono_sigma(i, j) for i in range(1, sym.dim + 1)
              for j in range(1, sym.dim + 1)]
    todo = []
    seen = set()
    for s in seeds:
        mom, _ = canonical_moment(s)
        if mom not in seen:
            seen.add(mom)
            todo.append(mom)
    variables = []
    equations = []
    k = 0
    while k < len(todo):
        mom = todo[k]
        k += 1
        rhs = heisenberg_rhs(sym, {mom.monomial: 1})
        eq = close_expression(rhs)
        variables.append(mom)
        equations.append(eq)
        for _, factors in eq:
            for fm, _conj in factors:
                if fm not in seen:
                    seen.add(fm)
                    todo.append(fm)
    system = MomentSystem(sym=sym, variables=variables, equations=equations)
    missing = seen - set(system.index)
    if missing:
        raise ClosureError(f"variables without equations: {sorted(missing)[:5]}")
    return system


def cumulant_close(expr: dict):
    """Public closure entry point: OperatorExpr -> moment polynomial terms."""
    return close_expression(expr)
