"""Tests of the operator algebra, moment-equation derivation and compilation."""

from math import pi
from pathlib import Path

import numpy as np
import pytest
from scipy.linalg import expm

from srlaser.cumulant import (
    Coeff,
    MissingBindingError,
    NonlinearParameterError,
    SymbolicLaserModel,
    UnsupportedOrderError,
    build_moment_system,
    canonical_moment,
    close_monomial,
    compile_system,
    heisenberg_rhs,
    mono_a,
    mono_adag,
    mono_mul,
    mono_sigma,
)
from srlaser.levels import liouvillian_for
from srlaser.reduction import reduce_scheme
from srlaser.sr88 import (
    LaserConfig,
    SixLevelConfig,
    six_level_laser_model,
    six_level_scheme,
    two_level_laser_model,
)

TWOPI = 2 * pi
DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def two_level_model():
    params = reduce_scheme(six_level_scheme(SixLevelConfig.standard()))
    return two_level_laser_model(params, LaserConfig.standard())


@pytest.fixture(scope="module")
def two_level_system(two_level_model):
    return build_moment_system(two_level_model)


# A gentle six-level operating point: all rates within a few decades of each
# other, so long-time matrix exponentials stay accurate to full precision.
MILD = dict(
    Omega13=3.0, Omega34=5.0, Omega54=4.0,
    Delta13=2.0, Delta34=-3.0, Delta54=-6.0,
    Gamma12=0.1, Gamma13=5.0, Gamma34=6.0, Gamma24=8.0,
    Gamma54=9.0, Gamma64=7.0, Gamma16=4.0,
    nu12=0.2, nu13=0.5, nu34=0.7, nu54=0.9,
)


class TestCoeff:
    def test_arithmetic(self):
        a = Coeff.param("g", 2.0)
        b = Coeff.number(3.0)
        c = a * b + Coeff.param("kappa", -0.5)
        val = c.evaluate({"g": 1.5, "kappa": 4.0})
        assert val == pytest.approx(2.0 * 1.5 * 3.0 - 0.5 * 4.0)

    def test_n_scaling(self):
        c = Coeff.param("g") * Coeff.n_minus(1)
        assert c.evaluate({"g": 2.0, "N": 5.0}) == pytest.approx(2.0 * 4.0)

    def test_product_of_parameters_rejected(self):
        with pytest.raises(NonlinearParameterError):
            Coeff.param("g") * Coeff.param("kappa")

    def test_conjugate(self):
        c = Coeff.number(1j) * Coeff.param("g")
        assert c.conjugate().evaluate({"g": 2.0}) == pytest.approx(-2j)


class TestHeisenberg:
    def test_pump_and_decay_rates(self, two_level_model):
        sym = SymbolicLaserModel.from_model(two_level_model)
        rhs = heisenberg_rhs(sym, {mono_sigma(2, 2): Coeff.number(1)})
        b = sym.bindings
        # d<s22>/dt = R <s11> - Gamma12 <s22> + field coupling
        assert rhs[mono_sigma(1, 1)].evaluate(b) == pytest.approx(b["r21"])
        assert rhs[mono_sigma(2, 2)].evaluate(b) == pytest.approx(-b["r12"])

    def test_coherence_decay_and_shift(self, two_level_model):
        sym = SymbolicLaserModel.from_model(two_level_model)
        rhs = heisenberg_rhs(sym, {mono_sigma(1, 2): Coeff.number(1)})
        b = sym.bindings
        got = rhs[mono_sigma(1, 2)].evaluate(b)
        total = b["r11"] + b["r12"] + b["r21"] + b["r22"]
        assert got == pytest.approx(1j * (b["h1"] - b["h2"]) - total / 2)

    def test_atomic_sector_matches_master_equation(self):
        # with g = 0 the single-atom moment equations must reproduce the
        # vectorized Liouvillian: d<s_ij>/dt rows equal L acting on rho_ji
        cfg = SixLevelConfig.standard(**{k: v for k, v in MILD.items()
                                         if k in MILD})
        scheme = six_level_scheme(cfg)
        model = six_level_laser_model(cfg, LaserConfig.standard(N=1, g=0.0))
        sym = SymbolicLaserModel.from_model(model)
        d = scheme.dim
        liouv = liouvillian_for(scheme)
        # moment matrix M: index (i,j) flattened as rho_ji entries
        m_mat = np.zeros((d * d, d * d), complex)
        for i in range(1, d + 1):
            for j in range(1, d + 1):
                rhs = heisenberg_rhs(sym, {mono_sigma(i, j): Coeff.number(1)})
                row = (i - 1) * d + (j - 1)   # <s_ij> = rho_ji, column-major vec
                for mono, coeff in rhs.items():
                    val = coeff.evaluate(sym.bindings)
                    if val == 0:   # field-coupling terms, g is bound to 0
                        continue
                    ((_, (k, l)),) = mono.atoms
                    assert mono.ndag == 0 and mono.n == 0
                    col = (k - 1) * d + (l - 1)
                    m_mat[row, col] += val
        assert np.allclose(m_mat, liouv, atol=1e-12 * np.abs(liouv).max())

    def test_population_conservation_symbolic(self, two_level_model):
        sym = SymbolicLaserModel.from_model(two_level_model)
        total = {}
        for i in (1, 2):
            rhs = heisenberg_rhs(sym, {mono_sigma(i, i): Coeff.number(1)})
            for mono, coeff in rhs.items():
                total[mono] = total.get(mono, Coeff.number(0)) + coeff
        assert all(not c for c in total.values())


class TestMoments:
    @staticmethod
    def _single(expr):
        # a product that does not reorder bosons is a single monomial
        ((mono, coeff),) = expr.items()
        assert coeff == 1
        return mono

    def test_permutation_symmetry_dedup(self):
        a = self._single(mono_mul(mono_sigma(1, 2, slot=1),
                                  mono_sigma(2, 1, slot=2)))
        b = self._single(mono_mul(mono_sigma(2, 1, slot=1),
                                  mono_sigma(1, 2, slot=2)))
        assert canonical_moment(a)[0] == canonical_moment(b)[0]

    def test_photon_number_real(self):
        mom, conj = canonical_moment(self._single(mono_mul(mono_adag(),
                                                           mono_a())))
        assert mom.is_real and not conj

    def test_conjugate_pair_single_variable(self):
        up = canonical_moment(self._single(mono_mul(mono_a(),
                                                    mono_sigma(2, 1))))
        dn = canonical_moment(self._single(mono_mul(mono_adag(),
                                                    mono_sigma(1, 2))))
        assert up[0] == dn[0]
        assert up[1] != dn[1]

    def test_order_above_three_rejected(self):
        from srlaser.cumulant import Monomial
        m = Monomial(ndag=2, n=2, atoms=())
        with pytest.raises(UnsupportedOrderError):
            close_monomial(m)


class TestMomentSystem:
    def test_two_level_golden_dump(self, two_level_system):
        golden = (DATA / "two_level_equations.txt").read_text()
        assert two_level_system.dump() == golden

    def test_dump_deterministic(self, two_level_model):
        a = build_moment_system(two_level_model).dump()
        b = build_moment_system(two_level_model).dump()
        assert a == b

    def test_conjugation_consistency(self, two_level_model):
        # d<a s21>/dt must be the conjugate of d<ad s12>/dt term by term
        sym = SymbolicLaserModel.from_model(two_level_model)
        up = heisenberg_rhs(sym, mono_mul(mono_a(), mono_sigma(2, 1)))
        dn = heisenberg_rhs(sym, mono_mul(mono_adag(), mono_sigma(1, 2)))
        b = sym.bindings
        got = {m.dagger(): np.conj(c.evaluate(b)) for m, c in dn.items()}
        want = {m: c.evaluate(b) for m, c in up.items()}
        assert set(got) == set(want)
        for m in want:
            assert got[m] == pytest.approx(want[m])


class TestCompiled:
    def test_missing_binding(self, two_level_system):
        with pytest.raises(MissingBindingError):
            compile_system(two_level_system, overrides={"not_a_param": 1.0})

    def test_pack_unpack_roundtrip(self, two_level_system):
        comp = compile_system(two_level_system)
        rng = np.random.default_rng(7)
        z = rng.normal(size=comp.n_complex) + 1j * rng.normal(size=comp.n_complex)
        # self-conjugate moments must hold real values for the packing to be exact
        z[comp.is_real] = z[comp.is_real].real
        assert np.allclose(comp.unpack(comp.pack(z)), z, atol=0, rtol=0)

    def test_jacobian_matches_finite_differences(self, two_level_system):
        comp = compile_system(two_level_system)
        rng = np.random.default_rng(3)
        x = 0.1 * rng.normal(size=comp.n_real)
        jac = comp.jac_real(x)
        eps = 1e-6
        for k in range(0, comp.n_real, 5):
            dx = np.zeros_like(x)
            dx[k] = eps
            fd = (comp.rhs_real(x + dx) - comp.rhs_real(x - dx)) / (2 * eps)
            scale = max(np.abs(jac[:, k]).max(), 1.0)
            assert np.allclose(jac[:, k], fd, atol=1e-4 * scale)

    def test_single_atom_zero_coupling_is_linear(self):
        cfg = SixLevelConfig.standard(**MILD)
        model = six_level_laser_model(cfg, LaserConfig.standard(N=1, g=0.0))
        comp = compile_system(build_moment_system(model))
        for deg in (0, 2, 3):
            coeffs = comp.terms.get(deg, (np.zeros(0),))[0]
            assert np.all(coeffs == 0)

    def test_single_atom_matches_master_equation(self):
        # exactness check: N = 1, g = 0 moment dynamics against the matrix
        # exponential of the single-atom master equation
        cfg = SixLevelConfig.standard(**MILD)
        scheme = six_level_scheme(cfg)
        model = six_level_laser_model(cfg, LaserConfig.standard(N=1, g=0.0))
        comp = compile_system(build_moment_system(model))
        d = scheme.dim

        rng = np.random.default_rng(11)
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho0 = m @ m.conj().T
        rho0 /= np.trace(rho0).real

        z0 = np.zeros(comp.n_complex, complex)
        for i in range(1, d + 1):
            for j in range(1, d + 1):
                idx, conj = comp.system.lookup(mono_sigma(i, j))
                val = rho0[j - 1, i - 1]
                z0[idx] = np.conj(val) if conj else val
        x0 = comp.pack(z0)

        jac = comp.jac_real(x0)
        assert np.allclose(comp.rhs_real(np.zeros_like(x0)), 0, atol=1e-30)
        liouv = liouvillian_for(scheme)
        min_rate = TWOPI * min(v for k, v in MILD.items()
                               if k.startswith(("Gamma", "nu")))
        for t in (0.01, 0.3, 10.0 / min_rate):
            x_t = expm(jac * t) @ x0
            rho_t = expm(liouv * t) @ rho0.flatten(order="F")
            rho_t = rho_t.reshape((d, d), order="F")
            for i in range(1, d + 1):
                for j in range(1, d + 1):
                    got = comp.moment_value(x_t, mono_sigma(i, j))
                    assert abs(got - rho_t[j - 1, i - 1]) < 1e-10
