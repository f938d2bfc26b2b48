import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial.hermite import hermval

from gek import specfun as S
from gek.errors import DomainError, RangeError, StructureError


def maclaurin_ai(z, terms=120):
    """Ai(z) = c1 f(z) - c2 g(z) from the two power series."""
    c1 = 3 ** (-2 / 3) / math.gamma(2 / 3)
    c2 = 3 ** (-1 / 3) / math.gamma(1 / 3)
    z = complex(z)
    z3 = z ** 3
    f, g = 0j, 0j
    tf, tg = 1.0 + 0j, z
    for k in range(terms):
        f += tf
        g += tg
        tf *= z3 / ((3 * k + 2) * (3 * k + 3))
        tg *= z3 / ((3 * k + 3) * (3 * k + 4))
    return c1 * f - c2 * g


def maclaurin_ai_prime(z, terms=120):
    h = 1e-5
    return (maclaurin_ai(z + h, terms) - maclaurin_ai(z - h, terms)) / (2 * h)


class TestAiry:
    def test_at_zero(self):
        assert S.airy_ai(0.0).real == pytest.approx(0.3550280538878172, rel=1e-15)
        assert S.airy_ai_prime(0.0).real == pytest.approx(-0.2588194037928068, rel=1e-15)

    def test_zero_values_match_gamma_closed_forms(self):
        assert S.airy_ai(0).real == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), rel=1e-15)
        assert S.airy_ai_prime(0).real == pytest.approx(-(3 ** (-1 / 3)) / math.gamma(1 / 3), rel=1e-15)

    def test_real_axis_value_is_real(self):
        assert S.airy_ai(5.0).imag == 0.0

    def test_large_positive_against_asymptotic_series(self):
        x = 10.0
        zeta = 2 / 3 * x ** 1.5
        # u_k coefficients of the large-argument expansion
        u = [1.0, 0.06944444444444445, 0.03713348765432099, 0.03799305912780064, 0.05764919041266972]
        series = sum((-1) ** k * u[k] / zeta**k for k in range(len(u)))
        oracle = math.exp(-zeta) / (2 * math.sqrt(math.pi) * x ** 0.25) * series
        assert S.airy_ai(x).real == pytest.approx(1.1047532552898685e-10, rel=1e-12)
        assert S.airy_ai(x).real == pytest.approx(oracle, rel=1e-5)

    def test_derivative_by_finite_difference(self):
        h = 1e-4
        fd = (S.airy_ai(1 + h) - S.airy_ai(1 - h)) / (2 * h)
        assert abs(fd - S.airy_ai_prime(1.0)) <= 1e-6

    def test_complex_argument_against_series(self):
        z = 2 + 1j
        assert abs(S.airy_ai(z) - maclaurin_ai(z)) <= 1e-10 * abs(maclaurin_ai(z))
        assert abs(S.airy_ai_prime(z) - maclaurin_ai_prime(z)) <= 1e-8

    @given(st.floats(-8, 8), st.floats(-8, 8))
    def test_matches_mpmath(self, x, y):
        z = complex(x, y)
        ref = complex(mpmath.airyai(mpmath.mpc(x, y)))
        refp = complex(mpmath.airyai(mpmath.mpc(x, y), derivative=1))
        assert abs(S.airy_ai(z) - ref) <= 1e-12 * max(1.0, abs(ref))
        assert abs(S.airy_ai_prime(z) - refp) <= 1e-12 * max(1.0, abs(refp))

    def test_arrays_keep_shape(self):
        out = S.airy_ai(np.linspace(-3, 3, 7).reshape(7, 1))
        assert out.shape == (7, 1)

    @pytest.mark.parametrize("bad", [math.inf, math.nan, 2e4])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            S.airy_ai(bad)

    def test_scaled_form_reconstructs(self):
        w = np.array([0.3 + 0.1j, 5.0, 40 - 3j])
        eai, zeta = S.scaled_airy(w)
        np.testing.assert_allclose(eai * np.exp(-zeta), S.airy_ai(w), rtol=1e-13)


class TestErfc:
    def test_values(self):
        assert S.erfc(0.0) == 1.0
        assert S.erfc(1.0) == pytest.approx(0.15729920705028513, rel=1e-15)

    def test_reflection(self):
        assert abs(S.erfc(-0.7) - (2 - S.erfc(0.7))) <= 1e-13

    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_complex_matches_mpmath(self, x, y):
        ref = complex(mpmath.erfc(mpmath.mpc(x, y)))
        assert abs(S.erfc(complex(x, y)) - ref) <= 1e-12 * max(1.0, abs(ref))

    @pytest.mark.parametrize("x", [-3.0, 0.0, 2.0, 30.0, 300.0])
    def test_log_erfc(self, x):
        assert S.log_erfc(x) == pytest.approx(float(mpmath.log(mpmath.erfc(x))), rel=1e-13, abs=1e-15)


class TestHermite:
    def test_examples(self):
        assert S.hermite_h(0, 3.7 - 2j).value() == 1
        assert S.hermite_h(1, 2 + 1j).value() == pytest.approx(4 + 2j)
        assert S.hermite_h(3, 1.0).value() == pytest.approx(-4.0)

    @given(st.integers(0, 20), st.floats(-5, 5), st.floats(-5, 5))
    def test_matches_direct_polynomial(self, n, x, y):
        z = complex(x, y)
        coef = np.zeros(n + 1)
        coef[n] = 1.0
        ref = hermval(z, coef)
        got = S.hermite_h(n, z).value()
        assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref))

    def test_large_degree_does_not_overflow(self):
        h = S.hermite_h(2000, 3.0)
        ref = mpmath.hermite(2000, 3)
        assert h.log_magnitude == pytest.approx(float(mpmath.log(abs(ref))), rel=1e-12)
        assert h.phase.real == pytest.approx(float(mpmath.sign(ref)))
        with pytest.raises(RangeError):
            h.value()

    def test_table_matches_pointwise(self):
        z = np.array([0.4, -2.0 + 1j])
        mant, logs = S.hermite_table(30, z)
        for n in (0, 7, 30):
            for k in range(2):
                assert mant[n, k] * np.exp(logs[n, k]) == pytest.approx(S.hermite_h(n, z[k]).value(), rel=1e-12)

    def test_negative_degree(self):
        with pytest.raises(DomainError):
            S.hermite_h(-1, 0.0)


class TestDeformedAiry:
    @pytest.mark.parametrize("Z", [-2.0, 0.0, 1.5 + 0.5j])
    def test_sigma_zero_is_airy(self, Z):
        assert S.deformed_airy(Z, 0.0) == pytest.approx(S.airy_ai(Z), rel=1e-14)

    def test_direct_substitution(self):
        assert S.deformed_airy(0.0, 1.0) == pytest.approx(math.exp(1 / 12) * S.airy_ai(0.25), rel=1e-14)

    def test_gaussian_scaling_at_large_sigma(self):
        sigma, u = 40.0, 0.5
        val = sigma * S.deformed_airy(sigma * u, sigma)
        assert val.real == pytest.approx(math.exp(-u * u / 2) / math.sqrt(2 * math.pi), rel=0.01)

    @given(st.floats(0.1, 6), st.floats(-4, 4), st.floats(-2, 2))
    def test_matches_mpmath(self, sigma, x, y):
        mpmath.mp.dps = 30
        Z = mpmath.mpc(x, y)
        ref = complex(mpmath.exp(mpmath.mpf(sigma) ** 6 / 12 + sigma**2 * Z / 2)
                      * mpmath.airyai(Z + mpmath.mpf(sigma) ** 4 / 4))
        mpmath.mp.dps = 15
        got = S.deformed_airy(complex(x, y), sigma)
        assert abs(got - ref) <= 1e-10 * abs(ref)

    def test_overflow_is_reported(self):
        with pytest.raises(RangeError):
            S.deformed_airy(300j, 0.0)

    def test_negative_sigma(self):
        with pytest.raises(DomainError):
            S.deformed_airy(0.0, -1.0)


class TestPfaffian:
    def test_two_by_two(self):
        assert S.pfaffian([[0, 3.5], [-3.5, 0]]) == pytest.approx(3.5)

    def test_four_by_four_formula(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((4, 4))
        a = a - a.T
        expected = a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
        assert S.pfaffian(a) == pytest.approx(expected, rel=1e-13)

    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_square_is_determinant(self, k, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((2 * k, 2 * k)) + 1j * rng.standard_normal((2 * k, 2 * k))
        a = a - a.T
        det = np.linalg.det(a)
        assert abs(S.pfaffian(a) ** 2 - det) <= 1e-10 * abs(det)

    @pytest.mark.parametrize("mat", [np.zeros((3, 3)), np.ones((2, 2)), np.zeros((14, 14)), np.zeros((2, 3))])
    def test_structure_errors(self, mat):
        with pytest.raises(StructureError):
            S.pfaffian(mat)

    def test_empty_matrix(self):
        assert S.pfaffian(np.zeros((0, 0))) == 1


def test_log_double_factorial():
    for n, ref in [(-1, 1), (0, 1), (1, 1), (5, 15), (6, 48), (9, 945)]:
        assert math.exp(S.log_double_factorial(n)) == pytest.approx(ref, rel=1e-13)
