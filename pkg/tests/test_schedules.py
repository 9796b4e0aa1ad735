import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from sqjc.schedules import (
    CoefficientSet,
    Constant,
    FunctionSchedule,
    Harmonic,
    Polynomial,
    ScheduleDomainError,
    Tabulated,
    as_schedule,
)

finite = st.floats(min_value=-3, max_value=3, allow_nan=False)
cplx = st.builds(complex, finite, finite)


def _central(s, t, h=1e-5):
    return (s(t + h) - s(t - h)) / (2 * h)


class TestEvaluation:
    def test_constant(self):
        s = Constant(2 + 0j)
        for t in (-4.0, 0.0, 17.0):
            assert s(t) == 2

    def test_harmonic_zero_crossing(self):
        s = Harmonic(1.0, 2.0)
        np.testing.assert_allclose(s(np.pi / 4), 0.0, atol=1e-15)

    def test_harmonic_phase_and_offset(self):
        s = Harmonic(0.5j, 1.3, phase=0.2, offset=1 - 1j)
        np.testing.assert_allclose(s(0.7), 0.5j * np.cos(1.3 * 0.7 + 0.2) + 1 - 1j)

    def test_polynomial(self):
        s = Polynomial(1, -2, 3)
        np.testing.assert_allclose(s(2.0), 1 - 4 + 12)

    def test_vectorised(self):
        t = np.linspace(0, 1, 7)
        np.testing.assert_allclose(Harmonic(1.0, 3.0)(t), np.cos(3 * t))
        assert Constant(1.0)(t).shape == t.shape

    def test_tabulated_interpolation_bound(self):
        knots = np.arange(0, 5 + 1e-12, 0.05)
        s = Tabulated(knots, np.cos(knots))
        mid = 0.5 * (knots[1:] + knots[:-1])
        assert np.max(np.abs(s(mid) - np.cos(mid))) < 1e-6

    def test_tabulated_no_extrapolation(self):
        knots = np.linspace(0, 1, 11)
        s = Tabulated(knots, knots ** 2)
        s(1.0)
        with pytest.raises(ScheduleDomainError):
            s(1.01)
        with pytest.raises(ScheduleDomainError):
            s.derivative(-0.1)

    @pytest.mark.parametrize("times", [[0, 1, 1, 2, 3], [0, 2, 1, 3, 4]])
    def test_tabulated_needs_increasing_knots(self, times):
        with pytest.raises(ValueError):
            Tabulated(np.array(times, float), np.zeros(5))

    def test_promotion(self):
        assert isinstance(as_schedule(0.3), Constant)
        s = Harmonic(1.0, 1.0)
        assert as_schedule(s) is s
        with pytest.raises(TypeError):
            as_schedule("x")


class TestDerivative:
    def test_constant(self):
        assert Constant(5.0).derivative(1.2) == 0

    def test_polynomial_square(self):
        np.testing.assert_allclose(Polynomial(0, 0, 1).derivative(3.0), 6.0)

    def test_harmonic_against_central_difference(self):
        s = Harmonic(0.7 - 0.2j, 2.3, phase=0.4, offset=0.1)
        for t in np.linspace(0, 5, 13):
            np.testing.assert_allclose(s.derivative(t), _central(s, t), atol=1e-8)

    def test_tabulated_spline_derivative(self):
        knots = np.linspace(0, 4, 201)
        s = Tabulated(knots, np.sin(knots))
        t = np.linspace(0.1, 3.9, 17)
        np.testing.assert_allclose(s.derivative(t), np.cos(t), atol=1e-6)

    def test_function_schedule(self):
        s = FunctionSchedule(np.exp, np.exp, real=True)
        np.testing.assert_allclose(s.derivative(0.5), _central(s, 0.5), rtol=1e-9)


class TestIntegral:
    @pytest.mark.parametrize("s", [
        Constant(1.5 - 0.5j),
        Harmonic(0.3 + 0.1j, 1.7, phase=0.3, offset=0.2),
        Harmonic(0.3, 0.0, phase=0.4),
        Polynomial(1, 0.5j, -0.25),
        Tabulated(np.linspace(0, 6, 61), np.exp(-np.linspace(0, 6, 61)) * (1 + 1j)),
        FunctionSchedule(np.sin, np.cos, real=True),
    ])
    def test_against_quadrature(self, s):
        a, b = 0.3, 5.1
        re = quad(lambda t: np.real(s(t)), a, b, epsabs=1e-13)[0]
        im = quad(lambda t: np.imag(s(t)), a, b, epsabs=1e-13)[0]
        np.testing.assert_allclose(s.integral(a, b), re + 1j * im, atol=1e-11)

    def test_reversed_bounds(self):
        s = Harmonic(1.0, 2.0)
        np.testing.assert_allclose(s.integral(2.0, 1.0), -s.integral(1.0, 2.0))


class TestCoefficientSet:
    def test_rejects_complex_frequencies(self):
        with pytest.raises(ValueError):
            CoefficientSet(1 + 0.1j, 1.0, 0.2)
        with pytest.raises(ValueError):
            CoefficientSet(1.0, Harmonic(0.1j, 1.0), 0.2)

    def test_at_and_replace(self):
        cs = CoefficientSet(1.0, 0.8, Harmonic(0.2, 1.0), 0.05j)
        omega, omega0, gamma, lam = cs.at(0.0)
        assert (omega, omega0) == (1.0, 0.8)
        np.testing.assert_allclose([gamma, lam], [0.2, 0.05j])
        cs2 = cs.replace(lam=0.0)
        assert cs2.at(0.0)[3] == 0
        assert [k for k, _ in cs.items()] == ["omega", "omega0", "gamma", "lambda"]


@st.composite
def schedules(draw):
    kind = draw(st.sampled_from(["constant", "harmonic", "polynomial", "tabulated"]))
    if kind == "constant":
        return Constant(draw(cplx))
    if kind == "harmonic":
        return Harmonic(draw(cplx), draw(finite), draw(finite), draw(cplx))
    if kind == "polynomial":
        return Polynomial(*draw(st.lists(cplx, min_size=1, max_size=4)))
    vals = draw(st.lists(cplx, min_size=6, max_size=6))
    return Tabulated(np.linspace(-1, 4, 6), np.array(vals))


@settings(max_examples=60, deadline=None)
@given(schedules(), st.floats(min_value=-1, max_value=4))
def test_conjugation_commutes_with_evaluation(s, t):
    c = s.conjugate()
    np.testing.assert_allclose(c(t), np.conj(s(t)), atol=1e-12)
    np.testing.assert_allclose(c.derivative(t), np.conj(s.derivative(t)), atol=1e-12)


def _real_part(s):
    if isinstance(s, Harmonic):
        return Harmonic(complex(s.amplitude).real, s.frequency, s.phase, complex(s.offset).real)
    if isinstance(s, Polynomial):
        return Polynomial(*np.real(s.coefficients))
    if isinstance(s, Tabulated):
        return Tabulated(s.times, s.values.real)
    return Constant(complex(s.value).real)


@settings(max_examples=60, deadline=None)
@given(schedules(), st.floats(min_value=-1, max_value=4))
def test_real_schedules_have_real_derivatives(s, t):
    real = _real_part(s)
    assert real.is_real
    assert np.imag(real.derivative(t)) == 0
    assert s.conjugate().is_real == s.is_real
