"""Tests of the laser pipeline: steady state, two-time correlation, spectrum."""

import warnings
from math import pi

import numpy as np
import pytest

from srlaser.cumulant import (
    build_moment_system,
    build_regression_system,
    compile_system,
    mono_a,
    mono_sigma,
)
from srlaser.laser import (
    correlation,
    correlation_window,
    ground_state,
    laser_spectrum,
    laser_steady_state,
    spectrum_from_correlation,
)
from srlaser.reduction import reduce_scheme
from srlaser.sr88 import (
    LaserConfig,
    SixLevelConfig,
    six_level_scheme,
    two_level_laser_model,
)

TWOPI = 2 * pi


@pytest.fixture(scope="module")
def reduced_params():
    return reduce_scheme(six_level_scheme(SixLevelConfig.standard()))


@pytest.fixture(scope="module")
def compiled_two_level(reduced_params):
    model = two_level_laser_model(reduced_params, LaserConfig.standard())
    return compile_system(build_moment_system(model))


@pytest.fixture(scope="module")
def steady_two_level(compiled_two_level):
    return laser_steady_state(compiled_two_level)


class TestSteadyState:
    def test_photon_number(self, steady_two_level):
        n = steady_two_level.photon_number
        assert n == pytest.approx(2.16, rel=0.05)

    def test_populations_conserved(self, steady_two_level):
        p = sum(steady_two_level.population(i) for i in (1, 2))
        assert p == pytest.approx(1.0, abs=1e-9)

    def test_residual_small(self, steady_two_level):
        assert steady_two_level.converged
        assert steady_two_level.residual < 1e-6

    def test_validate_clean(self, steady_two_level):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            steady_two_level.validate()

    def test_no_coupling_means_dark_cavity(self, compiled_two_level):
        dark = laser_steady_state(compiled_two_level.system, params={"g": 0.0})
        assert abs(dark.photon_number) < 1e-12
        assert abs(dark.value(mono_a())) < 1e-12

    def test_ground_state_seed(self, compiled_two_level):
        x = ground_state(compiled_two_level, level=1)
        comp = compiled_two_level
        assert comp.moment_value(x, mono_sigma(1, 1)) == pytest.approx(1.0)
        assert comp.moment_value(x, mono_sigma(2, 2)) == pytest.approx(0.0)


class TestRegression:
    def test_bare_cavity_decay_element(self, compiled_two_level):
        # with g = 0 the field correlation decays at (kappa + eta)/2 and
        # rotates at Delta_c; read that off the regression generator
        comp = compile_system(compiled_two_level.system, overrides={"g": 0.0})
        steady = laser_steady_state(comp)
        reg = build_regression_system(comp, steady)
        got = reg.matrix[reg.field_row, reg.field_row]
        b = comp.bindings
        want = 1j * b["Delta_c"] - (b["kappa"] + b["eta"]) / 2
        assert got == pytest.approx(want, rel=1e-12)

    def test_initial_value_is_photon_number(self, compiled_two_level,
                                            steady_two_level):
        reg = build_regression_system(compiled_two_level, steady_two_level)
        tau = correlation_window(reg)
        res = correlation(reg, tau)
        assert res.g[0].real == pytest.approx(steady_two_level.photon_number,
                                              rel=1e-9)
        assert abs(res.g[0].imag) < 1e-9 * abs(res.g[0].real)

    def test_correlation_decays_within_window(self, compiled_two_level,
                                              steady_two_level):
        reg = build_regression_system(compiled_two_level, steady_two_level)
        res = correlation(reg, correlation_window(reg))
        assert res.window_ok
        assert abs(res.g[-1]) < 1e-3 * abs(res.g[0])


def synthetic_correlation(n, gamma, delta_p, tau):
    # a field at lab offset delta_p decaying at gamma:
    # <a^dag(0) a(tau)> = n exp(-(gamma + i delta_p) tau)
    return n * np.exp(-(gamma + 1j * delta_p) * tau)


class TestSpectrumExtractor:
    N, GAMMA, DELTA = 2.5, 0.003, -0.032

    def _tau(self, points=60000, cycles=9.0):
        return np.linspace(0.0, cycles / self.GAMMA, points)

    def test_lorentzian_oracle(self):
        g = synthetic_correlation(self.N, self.GAMMA, self.DELTA, self._tau())
        res = spectrum_from_correlation(g, self._tau())
        assert res.fwhm == pytest.approx(2 * self.GAMMA, rel=1e-3)
        assert res.delta_p == pytest.approx(self.DELTA, rel=1e-3)
        assert res.n == pytest.approx(self.N, rel=1e-3)

    def test_spectrum_real_and_positive_at_peak(self):
        g = synthetic_correlation(self.N, self.GAMMA, self.DELTA, self._tau())
        res = spectrum_from_correlation(g, self._tau())
        assert np.isrealobj(res.S)
        assert res.S.max() > 0
        # Lorentzian peak height 2 n / gamma
        assert res.S.max() == pytest.approx(2 * self.N / self.GAMMA, rel=1e-2)

    def test_grid_halving_stable(self):
        tau = self._tau(points=120001)
        g = synthetic_correlation(self.N, self.GAMMA, self.DELTA, tau)
        fine = spectrum_from_correlation(g, tau)
        coarse = spectrum_from_correlation(g[::2], tau[::2])
        assert coarse.fwhm == pytest.approx(fine.fwhm, rel=5e-3)
        assert coarse.delta_p == pytest.approx(fine.delta_p, abs=5e-3 * fine.fwhm)

    def test_short_window_refused(self):
        tau = np.linspace(0.0, 0.1 / self.GAMMA, 4000)
        g = synthetic_correlation(self.N, self.GAMMA, self.DELTA, tau)
        with pytest.warns(UserWarning):
            res = spectrum_from_correlation(g, tau)
        assert not res.window_ok
        assert np.isnan(res.fwhm)

    def test_non_uniform_grid_rejected(self):
        tau = np.geomspace(1e-3, 1e3, 500)
        g = synthetic_correlation(self.N, self.GAMMA, self.DELTA, tau)
        with pytest.raises(ValueError):
            spectrum_from_correlation(g, tau)


class TestEndToEnd:
    def test_sign_convention(self, reduced_params):
        # the pump shifts the ground state by delta1, so the emitted line
        # sits at -delta1 relative to the unperturbed clock transition
        model = two_level_laser_model(reduced_params, LaserConfig.standard())
        res = laser_spectrum(model)
        assert res.delta_p == pytest.approx(-reduced_params.delta1, rel=0.02)

    def test_photon_number_in_spectrum(self, reduced_params,
                                       steady_two_level):
        model = two_level_laser_model(reduced_params, LaserConfig.standard())
        res = laser_spectrum(model)
        assert res.n == pytest.approx(steady_two_level.photon_number, rel=1e-6)
