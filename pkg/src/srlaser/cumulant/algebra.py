"""Normal-ordered operator algebra for one bosonic mode and identical atoms.

A monomial is ``a_dag^p a^q * prod_k sigma_{i_k j_k}^{(slot_k)}`` with at
most one transition operator per atom slot.  Operator expressions are dicts
mapping monomials to coefficients.  Products are normalized on the fly:
bosonic reordering via [a, a_dag] = 1 and same-slot contraction via
sigma_ij sigma_kl = delta_jk sigma_il.

Coefficients are :class:`Coeff` linear combinations ``sum_k c_k p_k N^{m_k}``
of the model parameters (every Hamiltonian and rate parameter enters the
equations of motion linearly, and N only through atom-count multiplicities),
or plain numbers.  Keeping this structure explicit instead of using a
general CAS makes deriving a few hundred equations essentially instant.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import sympy as sp


class UnsupportedOrderError(ValueError):
    """A moment of order > 3 appeared; the closure does not handle it."""


class NonlinearParameterError(ValueError):
    """A product of two model parameters appeared; coefficients are linear."""


class Coeff:
    """Linear combination of parameters: dict[(param, N_power)] -> complex.

    ``param`` is a parameter name or "" for a pure number.  Parameters are
    real; N is the (real, positive) atom count.  Products are only defined
    when at least one factor is parameter-free, which is all the equation
    derivation ever needs.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        self.terms = terms

    @classmethod
    def number(cls, c) -> "Coeff":
        c = complex(c)
        return cls({("", 0): c} if c else {})

    @classmethod
    def param(cls, name: str, scale=1.0) -> "Coeff":
        return cls({(name, 0): complex(scale)})

    @classmethod
    def n_minus(cls, m: int) -> "Coeff":
        """The multiplicity factor (N - m)."""
        terms = {("", 1): 1 + 0j}
        if m:
            terms[("", 0)] = complex(-m)
        return cls(terms)

    @property
    def is_number(self) -> bool:
        return all(p == "" and k == 0 for p, k in self.terms)

    @property
    def params(self) -> set:
        return {p for p, _ in self.terms if p}

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Coeff):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == {("", 0): complex(other)}

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> "Coeff":
        if not isinstance(other, Coeff):
            if other == 0:
                return self
            other = Coeff.number(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            nv = t.get(k, 0) + v
            if nv == 0:
                t.pop(k, None)
            else:
                t[k] = nv
        return Coeff(t)

    __radd__ = __add__

    def __neg__(self) -> "Coeff":
        return Coeff({k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "Coeff":
        return self + (-other if isinstance(other, Coeff) else -complex(other))

    def __mul__(self, other) -> "Coeff":
        if isinstance(other, Coeff):
            a, b = self, other
            if b.params and a.params:
                raise NonlinearParameterError(
                    f"product of parameters {a.params} and {b.params}")
            out = {}
            for (p, k), v in a.terms.items():
                for (q, m), w in b.terms.items():
                    key = (p or q, k + m)
                    nv = out.get(key, 0) + v * w
                    if nv == 0:
                        out.pop(key, None)
                    else:
                        out[key] = nv
            return Coeff(out)
        c = complex(other)
        if c == 0:
            return Coeff({})
        return Coeff({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def conjugate(self) -> "Coeff":
        return Coeff({k: v.conjugate() for k, v in self.terms.items()})

    def evaluate(self, bindings: dict) -> complex:
        n = bindings.get("N", 1.0)
        total = 0j
        for (p, k), v in self.terms.items():
            total += v * (bindings[p] if p else 1.0) * n ** k
        return total

    def to_sympy(self):
        n_sym = sp.Symbol("N", positive=True)
        total = sp.Integer(0)
        for (p, k), v in sorted(self.terms.items()):
            term = sp.nsimplify(v, rational=True)
            if p:
                term *= sp.Symbol(p, real=True)
            if k:
                term *= n_sym ** k
            total += term
        return total

    def __repr__(self):
        return f"Coeff({sp.sstr(self.to_sympy())})"


def as_coeff(c) -> Coeff:
    return c if isinstance(c, Coeff) else Coeff.number(c)


def conj_coeff(c):
    return c.conjugate() if isinstance(c, Coeff) else complex(c).conjugate()


@dataclass(frozen=True, order=True)
class Monomial:
    """Normal-ordered product: ndag a_dag's, n a's, one sigma per slot.

    ``atoms`` is a tuple of ``(slot, (i, j))`` sorted by slot.
    """

    ndag: int = 0
    n: int = 0
    atoms: tuple = ()

    def __post_init__(self):
        slots = [s for s, _ in self.atoms]
        if slots != sorted(slots) or len(set(slots)) != len(slots):
            raise ValueError("atom ops must be slot-sorted and unique per slot")

    @property
    def order(self) -> int:
        return self.ndag + self.n + len(self.atoms)

    @property
    def slots(self) -> tuple:
        return tuple(s for s, _ in self.atoms)

    def dagger(self) -> "Monomial":
        return Monomial(
            ndag=self.n, n=self.ndag,
            atoms=tuple((s, (j, i)) for s, (i, j) in self.atoms),
        )

    def relabel(self, mapping: dict) -> "Monomial":
        atoms = sorted((mapping.get(s, s), op) for s, op in self.atoms)
        return Monomial(ndag=self.ndag, n=self.n, atoms=tuple(atoms))


IDENTITY = Monomial()


def mono_a(power: int = 1) -> Monomial:
    return Monomial(n=power)


def mono_adag(power: int = 1) -> Monomial:
    return Monomial(ndag=power)


def mono_sigma(i: int, j: int, slot: int = 1) -> Monomial:
    return Monomial(atoms=((slot, (i, j)),))


# -- expression helpers -------------------------------------------------------
# An OperatorExpr is dict[Monomial, sympy expression]; zero coefficients are
# dropped eagerly.

def expr_iadd(target: dict, other: dict, scale=1):
    for m, c in other.items():
        new = target.get(m, 0) + scale * c
        if new == 0:
            target.pop(m, None)
        else:
            target[m] = new
    return target


def expr_scale(e: dict, scale) -> dict:
    return {m: scale * c for m, c in e.items()}


def _merge_atoms(a1: tuple, a2: tuple):
    """Product of slot-sorted sigma strings; None when a contraction vanishes."""
    d = dict(a1)
    out = dict(a1)
    for slot, (i, j) in a2:
        if slot in d:
            pi, pj = d[slot]
            if pj != i:
                return None
            out[slot] = (pi, j)
        else:
            out[slot] = (i, j)
    return tuple(sorted(out.items()))


def mono_mul(m1: Monomial, m2: Monomial) -> dict:
    """Normal-ordered product of two monomials as an OperatorExpr."""
    atoms = _merge_atoms(m1.atoms, m2.atoms)
    if atoms is None:
        return {}
    out = {}
    # reorder a^{q1} adag^{p2} = sum_k k! C(q1,k) C(p2,k) adag^{p2-k} a^{q1-k}
    q1, p2 = m1.n, m2.ndag
    for k in range(min(q1, p2) + 1):
        coeff = factorial(k) * comb(q1, k) * comb(p2, k)
        mono = Monomial(ndag=m1.ndag + p2 - k, n=q1 + m2.n - k, atoms=atoms)
        out[mono] = out.get(mono, 0) + coeff
    return out


def expr_mul(e1: dict, e2: dict) -> dict:
    out = {}
    for m1, c1 in e1.items():
        for m2, c2 in e2.items():
            prod = mono_mul(m1, m2)
            for m, k in prod.items():
                new = out.get(m, 0) + c1 * c2 * k
                if new == 0:
                    out.pop(m, None)
                else:
                    out[m] = new
    return out


def expr_dagger(e: dict) -> dict:
    return {m.dagger(): conj_coeff(c) for m, c in e.items()}


def commutator(e1: dict, e2: dict) -> dict:
    out = expr_mul(e1, e2)
    return expr_iadd(out, expr_mul(e2, e1), scale=-1)


def dissipator_heisenberg(jump_expr: dict, op: dict) -> dict:
    """Adjoint Lindblad term J+ O J - (J+ J O + O J+ J)/2 (rate not included)."""
    jd = expr_dagger(jump_expr)
    jdj = expr_mul(jd, jump_expr)
    out = expr_mul(expr_mul(jd, op), jump_expr)
    expr_iadd(out, expr_mul(jdj, op), scale=sp.Rational(-1, 2))
    expr_iadd(out, expr_mul(op, jdj), scale=sp.Rational(-1, 2))
    return out


# -- canonical moments --------------------------------------------------------

def _sorted_by_content(m: Monomial) -> Monomial:
    """Relabel atom slots 1..k in lexicographic order of their (i, j) content.

    Valid because all atoms are identical: expectation values are invariant
    under any permutation of atom slots.
    """
    ops = sorted(op for _, op in m.atoms)
    return Monomial(ndag=m.ndag, n=m.n,
                    atoms=tuple((k + 1, op) for k, op in enumerate(ops)))


@dataclass(frozen=True, order=True)
class Moment:
    """Canonical representative of an expectation value <monomial>."""

    monomial: Monomial

    @property
    def is_real(self) -> bool:
        return _sorted_by_content(self.monomial.dagger()) == self.monomial

    def label(self) -> str:
        return moment_label(self.monomial)


def canonical_moment(m: Monomial):
    """Map a monomial to (Moment, conj_flag) dedupe by slot permutation + conjugation."""
    ms = _sorted_by_content(m)
    md = _sorted_by_content(m.dagger())
    if md < ms:
        return Moment(md), True
    return Moment(ms), False


def moment_label(m: Monomial) -> str:
    parts = []
    if m.ndag:
        parts.append("ad" if m.ndag == 1 else f"ad^{m.ndag}")
    if m.n:
        parts.append("a" if m.n == 1 else f"a^{m.n}")
    multi = len(m.atoms) > 1
    for slot, (i, j) in m.atoms:
        parts.append(f"s{i}{j}.{slot}" if multi else f"s{i}{j}")
    return "<" + ("*".join(parts) if parts else "1") + ">"


def unit_factors(m: Monomial) -> list:
    """Split into order-1 monomials, preserving normal order."""
    units = [mono_adag() for _ in range(m.ndag)]
    units += [mono_a() for _ in range(m.n)]
    units += [Monomial(atoms=(a,)) for a in m.atoms]
    return units


def combine_units(units) -> Monomial:
    """Product of unit factors given in original (normal) order."""
    ndag = sum(u.ndag for u in units)
    n = sum(u.n for u in units)
    atoms = tuple(sorted(a for u in units for a in u.atoms))
    return Monomial(ndag=ndag, n=n, atoms=atoms)


def close_monomial(m: Monomial) -> list:
    """Second-order cumulant closure of <monomial>.

    Returns a list of terms ``(coeff, factors)`` where each factor is a
    ``(Moment, conj_flag)`` pair; an empty factor tuple is a constant.
    """
    order = m.order
    if order == 0:
        return [(1, ())]
    if order <= 2:
        return [(1, (canonical_moment(m),))]
    if order == 3:
        x, y, z = unit_factors(m)
        c = canonical_moment
        # factor tuples are sorted so identical products merge across terms
        return [
            (1, tuple(sorted((c(combine_units([x, y])), c(z))))),
            (1, tuple(sorted((c(combine_units([x, z])), c(y))))),
            (1, tuple(sorted((c(combine_units([y, z])), c(x))))),
            (-2, tuple(sorted((c(x), c(y), c(z))))),
        ]
    raise UnsupportedOrderError(
        f"moment of order {order} cannot arise from bilinear Hamiltonians: {m}"
    )


def close_expression(e: dict) -> list:
    """Closure of a whole OperatorExpr; merges identical factor tuples."""
    acc = {}
    for m, coeff in e.items():
        for c, factors in close_monomial(m):
            key = factors
            acc[key] = acc.get(key, 0) + coeff * c
    return [(c, f) for f, c in acc.items() if c != 0]
