import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial.legendre import leggauss
from scipy import special

from gek import finite_n as F
from gek.errors import DomainError


def box_mass(density, xhalf, ytop, nodes=120, half_plane=False):
    """Tensor Gauss-Legendre integral of density over [-xhalf, xhalf] x [-ytop, ytop]."""
    x, w = leggauss(nodes)
    X, WX = xhalf * x, xhalf * w
    if half_plane:
        # density symmetric in y with a kink at y = 0: integrate y > 0 and double
        Y, WY = 0.5 * ytop * (x + 1), 0.5 * ytop * w
        factor = 2.0
    else:
        Y, WY = ytop * x, ytop * w
        factor = 1.0
    Z = X[:, None] + 1j * Y[None, :]
    return factor * float(np.sum(np.outer(WX, WY) * density(Z)))


class TestSpecAndWeights:
    @pytest.mark.parametrize("args", [(3, 4, 0.5), (2, 0, 0.5), (1, 3, 0.5), (4, 5, 0.2),
                                      (2, 4, 1.0), (2, 4, -0.1), (2, 5000, 0.3)])
    def test_invalid_specs(self, args):
        with pytest.raises(DomainError):
            F.EnsembleSpec(*args)

    def test_weak_scaling(self):
        spec = F.EnsembleSpec.weak(2, 125, 1.0)
        assert spec.tau == pytest.approx(1 - 1 / 5)
        assert spec.edge_point(0.0) == pytest.approx((1 + spec.tau) * math.sqrt(125))

    def test_weight_at_origin(self):
        assert F.weight(2, 0.0, 0.3) == 1.0

    def test_weight_substitution(self):
        assert F.weight(2, 1 + 1j, 0.5) == pytest.approx(math.exp(-8 / 3), rel=1e-15)

    @given(st.floats(-6, 6), st.floats(0, 0.99))
    def test_real_weight_is_square_root(self, x, tau):
        assert F.weight(1, x, tau) == pytest.approx(math.sqrt(F.weight(2, x, tau)), rel=1e-13)
        assert F.weight(1, x, tau) == pytest.approx(math.exp(-x * x / (2 * (1 + tau))), rel=1e-13)


class TestBeta2:
    def test_single_eigenvalue(self):
        spec = F.EnsembleSpec(2, 1, 0.4)
        z1, z2 = 0.3 + 0.2j, -0.5 + 0.1j
        ref = math.sqrt(F.weight(2, z1, 0.4) * F.weight(2, z2, 0.4)) / (math.pi * math.sqrt(1 - 0.16))
        assert F.kernel_b2(z1, z2, spec) == pytest.approx(ref, rel=1e-14)

    @given(st.integers(1, 30), st.floats(0.0, 0.95), st.complex_numbers(max_magnitude=5),
           st.complex_numbers(max_magnitude=5))
    def test_parity(self, n, tau, z1, z2):
        spec = F.EnsembleSpec(2, n, tau)
        a, b = F.kernel_b2(z1, z2, spec), F.kernel_b2(-z1, -z2, spec)
        assert abs(a - b) <= 1e-12 * max(abs(a), 1e-300)

    def test_total_mass(self):
        spec = F.EnsembleSpec(2, 3, 0.5)
        mass = box_mass(lambda Z: F.kernel_b2(Z, np.conj(Z), spec).real, 9, 7)
        assert mass == pytest.approx(3.0, abs=1e-6)

    def test_large_n_stays_finite(self):
        spec = F.EnsembleSpec.weak(2, 4000, 1.0)
        z = spec.edge_point(0.3 + 0.2j)
        val = F.kernel_b2(z, np.conj(z), spec)
        assert np.isfinite(val) and val.real > 0


class TestBeta4:
    def test_two_point_prekernel(self):
        tau = 0.3
        spec = F.EnsembleSpec(4, 2, tau)
        r0 = 2 * math.pi * (1 - tau) ** 1.5 * (1 + tau) ** 0.5
        z1, z2 = 0.4 + 0.9j, -1.1 + 0.2j
        assert F.prekernel_b4(z1, z2, spec) == pytest.approx((z1 - z2) / r0, rel=1e-14)

    def test_two_point_density(self):
        tau = 0.3
        spec = F.EnsembleSpec(4, 2, tau)
        r0 = 2 * math.pi * (1 - tau) ** 1.5 * (1 + tau) ** 0.5
        # (-2i) |y| w(i) (i - (-i)) / r0 with w(i) = exp(-1/(1 - tau))
        ref = 4 * math.exp(-1 / (1 - tau)) / r0
        assert F.kernel_b4(1j, -1j, spec) == pytest.approx(ref, rel=1e-12)

    @given(st.integers(1, 10).map(lambda k: 2 * k), st.floats(0.05, 0.9),
           st.complex_numbers(max_magnitude=4), st.complex_numbers(max_magnitude=4))
    def test_antisymmetry_and_sign_flip(self, n, tau, z1, z2):
        spec = F.EnsembleSpec(4, n, tau)
        k = F.prekernel_b4(z1, z2, spec)
        scale = max(abs(k), 1e-300)
        assert abs(k + F.prekernel_b4(z2, z1, spec)) <= 1e-12 * scale
        assert abs(k + F.prekernel_b4(-z1, -z2, spec)) <= 1e-12 * scale
        assert F.prekernel_b4(z1, z1, spec) == 0

    def test_real_axis_repulsion(self):
        spec = F.EnsembleSpec(4, 8, 0.5)
        assert F.kernel_b4(1.3, 1.3, spec) == 0

    def test_density_real_and_nonnegative(self):
        rng = np.random.default_rng(3)
        spec = F.EnsembleSpec(4, 10, 0.4)
        z = rng.uniform(-4, 4, 50) + 1j * rng.uniform(-3, 3, 50)
        vals = F.kernel_b4(z, np.conj(z), spec)
        assert np.all(np.abs(vals.imag) <= 1e-14 * np.abs(vals.real).max())
        assert np.all(vals.real >= 0)

    def test_mass_counts_pairs(self):
        # R_1 counts each conjugate pair once: its integral is n / 2
        spec = F.EnsembleSpec(4, 4, 0.5)
        mass = box_mass(lambda Z: F.kernel_b4(Z, np.conj(Z), spec).real, 9, 7, half_plane=True)
        assert mass == pytest.approx(2.0, abs=1e-6)

    def test_one_point_pfaffian_is_density(self):
        spec = F.EnsembleSpec(4, 6, 0.3)
        z = 0.7 + 0.5j
        assert F.correlations([z], spec) == pytest.approx(F.kernel_b4(z, z.conjugate(), spec).real, rel=1e-12)
        blk = F.matrix_kernel_b4(z, z, spec).block()
        assert blk[0, 0] == 0 and blk[1, 1] == 0

    def test_upper_half_plane_required(self):
        with pytest.raises(DomainError):
            F.matrix_kernel_b4(0.3 - 0.1j, 0.2j, F.EnsembleSpec(4, 4, 0.3))


class TestBeta1:
    def test_two_point_prekernel(self):
        tau = 0.6
        spec = F.EnsembleSpec(1, 2, tau)
        z1, z2 = 0.4 + 0.9j, -1.1 + 0.2j
        ref = (z1 - z2) / (2 * math.sqrt(2 * math.pi) * (1 + tau))
        assert F.prekernel_b1(z1, z2, spec) == pytest.approx(ref, rel=1e-14)
        assert F.prekernel_b1(z1, z1, spec) == 0

    def test_identity_at_stated_point(self):
        spec = F.EnsembleSpec(1, 6, 0.4)
        rng = np.random.default_rng(0)
        z1 = rng.uniform(-3, 3, 20) + 1j * rng.uniform(-2, 2, 20)
        z2 = rng.uniform(-3, 3, 20) + 1j * rng.uniform(-2, 2, 20)
        assert np.max(F.identity_b1_b2_residual(z1, z2, spec)) <= 1e-10

    @given(st.integers(1, 15).map(lambda k: 2 * k), st.floats(0.05, 0.95),
           st.complex_numbers(max_magnitude=6), st.complex_numbers(max_magnitude=6))
    def test_identity_property(self, n, tau, z1, z2):
        assert F.identity_b1_b2_residual(z1, z2, F.EnsembleSpec(1, n, tau)) <= 1e-10

    def test_g_real_two_routes(self):
        spec = F.EnsembleSpec(1, 6, 0.5)
        assert F.identity_gr_residual(0.3 + 0.2j, -0.1, spec) <= 1e-10

    @given(st.integers(1, 8).map(lambda k: 2 * k), st.floats(0.05, 0.95),
           st.complex_numbers(max_magnitude=5), st.floats(-5, 5))
    def test_g_real_routes_property(self, n, tau, z1, x2):
        assert F.identity_gr_residual(z1, x2, F.EnsembleSpec(1, n, tau)) <= 1e-10

    def test_real_density_nonnegative(self):
        spec = F.EnsembleSpec(1, 8, 0.5)
        assert np.all(F.density_real_b1(np.linspace(-8, 8, 161), spec) >= 0)

    def test_total_mass_real_plus_complex(self):
        spec = F.EnsembleSpec(1, 4, 0.5)
        x, w = leggauss(120)
        real = float(np.sum(9 * w * F.density_real_b1(9 * x, spec)))
        cplx = box_mass(lambda Z: F.density_complex_b1(Z, spec), 9, 7, half_plane=True)
        assert real + cplx == pytest.approx(4.0, abs=1e-8)

    def test_vanishing_elements(self):
        spec = F.EnsembleSpec(1, 6, 0.4)
        assert F.g_complex_b1(0.3 + 0.4j, 1.2, spec) == 0
        assert F.w_cc_b1(0.7, 0.7, spec) == 0

    @given(st.floats(-4, 4), st.floats(-4, 4))
    def test_w_rr_antisymmetric(self, x1, x2):
        spec = F.EnsembleSpec(1, 6, 0.4)
        a, b = F.w_rr_b1(x1, x2, spec), F.w_rr_b1(x2, x1, spec)
        assert abs(a + b) <= 1e-12 * abs(a) + 1e-15

    def test_block_entries_match_elements(self):
        spec = F.EnsembleSpec(1, 6, 0.4)
        z1, x2 = 0.3 + 0.5j, -0.4 + 0j
        blk = F.matrix_kernel_b1(z1, x2, spec)
        assert blk.real_axis == (False, True)
        assert blk.g == pytest.approx(F.g_real_b1(z1, -0.4, spec), rel=1e-13)

    def test_density_is_one_point_pfaffian(self):
        spec = F.EnsembleSpec(1, 6, 0.4)
        assert F.correlations([0.6], spec) == pytest.approx(F.density_real_b1(0.6, spec), rel=1e-12)
        z = 0.6 + 0.4j
        assert F.correlations([z], spec) == pytest.approx(F.density_complex_b1(z, spec), rel=1e-12)


class TestIntegralsIj:
    @pytest.mark.parametrize("x, tau", [(0.3, 0.2), (-1.5, 0.7), (2.5, 0.5)])
    def test_zeroth_is_erf(self, x, tau):
        ref = math.sqrt(2 * math.pi * (1 + tau)) * special.erf(x / math.sqrt(2 * (1 + tau)))
        assert F.i_j(x, tau, 0) == pytest.approx(ref, rel=1e-13)

    @pytest.mark.parametrize("x, tau", [(0.3, 0.2), (-1.5, 0.7), (2.5, 0.5)])
    def test_first_is_weight(self, x, tau):
        ref = -(2 * math.sqrt(2) * (1 + tau) / math.sqrt(tau)) * F.weight(1, x, tau)
        assert F.i_j(x, tau, 1) == pytest.approx(ref, rel=1e-13)

    def test_against_direct_quadrature(self):
        assert F.i_j(0.7, 0.4, 5) == pytest.approx(F.i_j_quadrature(0.7, 0.4, 5), rel=1e-8)

    def test_quadrature_oracle_matches_mpmath_builtin(self):
        # the oracle's own Hermite recurrence against mpmath.hermite
        x, tau, j = -0.8, 0.3, 4
        mpmath.mp.dps = 25
        f = lambda t: mpmath.sign(x - t) * mpmath.exp(-t * t / (2 * (1 + tau))) * mpmath.hermite(j, t / mpmath.sqrt(2 * tau))
        ref = float(mpmath.quad(f, [-mpmath.inf, x, mpmath.inf]))
        mpmath.mp.dps = 15
        assert F.i_j_quadrature(x, tau, j) == pytest.approx(ref, rel=1e-12)

    @given(st.floats(-4, 4), st.floats(0.02, 0.98), st.integers(0, 30))
    def test_recurrence(self, x, tau, j):
        assert F.i_j_recurrence_residual(x, tau, j) <= 1e-10


class TestCorrelations:
    def test_two_point_bounded_by_product(self):
        spec = F.EnsembleSpec(2, 6, 0.4)
        z1, z2 = 0.5 + 0.3j, -0.2 + 0.7j
        r2 = F.correlations([z1, z2], spec)
        r1 = F.correlations([z1], spec) * F.correlations([z2], spec)
        assert 0 <= r2 <= r1

    @pytest.mark.parametrize("beta", [1, 2, 4])
    def test_coincident_points_vanish(self, beta):
        spec = F.EnsembleSpec(beta, 6, 0.4)
        z = 0.5 + 0.3j
        assert abs(F.correlations([z, z], spec)) <= 1e-12 * F.correlations([z], spec) ** 2

    def test_too_many_points(self):
        with pytest.raises(DomainError):
            F.correlations([0.1j] * 5, F.EnsembleSpec(2, 6, 0.4))

    def test_beta4_conjugation_invariance(self):
        spec = F.EnsembleSpec(4, 8, 0.4)
        a, b = 0.3 + 0.6j, -0.7 + 0.2j
        ref = F.correlations([a, b], spec)
        assert F.correlations([a.conjugate(), b], spec) == pytest.approx(ref, rel=1e-12)
