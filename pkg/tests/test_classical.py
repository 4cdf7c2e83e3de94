import math

import numpy as np
import pytest

from ldlab.classical import (
    DirichletFormSpec,
    LaguerreBasis,
    PolyInLaguerre,
    basis_poly,
    bj_coeff,
    derivative_coeffs,
    dirichlet_inner,
    gamma_ratio,
    gauss_quadrature,
    jacobi_spectrum,
    laguerre_apply_A,
    laguerre_deriv,
    laguerre_eval,
    laguerre_identity_check,
    laguerre_identity_table,
    laguerre_norm_sq,
    spectral_inner,
    x_poly,
)


class TestBjCoefficients:
    def test_spot_table_n2_k1(self):
        assert bj_coeff(2, 1, 0) == 1.0
        assert bj_coeff(2, 1, 1) == 3.0      # -1 + 4
        assert bj_coeff(2, 1, 2) == 1.0      # (1 - 8 + 9) / 2

    @pytest.mark.parametrize("n", range(1, 7))
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_endpoints_exact(self, n, k):
        assert bj_coeff(n, k, 0) == float(k) ** n
        assert bj_coeff(n, k, n) == 1.0

    def test_noninteger_k(self):
        # j = 1, n = 2: -(k^2) + (k+1)^2 = 2k + 1
        k = 1.5
        assert bj_coeff(2, k, 1) == pytest.approx(2 * k + 1, rel=1e-14)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError, match="outside"):
            bj_coeff(2, 1.0, 3)
        with pytest.raises(ValueError, match="positive"):
            bj_coeff(2, 0.0, 1)


class TestLaguerreBasis:
    def test_l0_is_one(self):
        basis = LaguerreBasis.build(0.7, 5)
        assert laguerre_eval(basis, 0, 3.3) == 1.0

    def test_l1_alpha1_at_zero(self):
        basis = LaguerreBasis.build(1.0, 5)
        assert laguerre_eval(basis, 1, 0.0) == 2.0   # L_1^a = a + 1 - x

    def test_derivative_identity(self):
        # d/dx L_1^a = -1 = -L_0^{a+1}
        basis = LaguerreBasis.build(0.5, 5)
        assert laguerre_deriv(basis, 1, 1.7) == -1.0
        xs = np.linspace(0.1, 5.0, 7)
        shifted = LaguerreBasis.build(basis.alpha + 1, 3)
        np.testing.assert_allclose(laguerre_deriv(basis, 4, xs),
                                   -shifted.eval_all(xs)[3], rtol=1e-12)

    def test_out_of_range_degree(self):
        basis = LaguerreBasis.build(0.0, 3)
        with pytest.raises(ValueError, match="outside"):
            laguerre_eval(basis, 4, 1.0)

    @pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 30])
    def test_norm_by_quadrature(self, n):
        alpha = 0.5
        basis = LaguerreBasis.build(alpha, 30)
        rule = gauss_quadrature(alpha, n + 1)
        values = basis.eval_all(rule.nodes)[n]
        integral = rule.integrate_values(values ** 2)
        assert integral == pytest.approx(laguerre_norm_sq(n, alpha), rel=1e-10)

    def test_gamma_ratio_large_arguments(self):
        # Gamma(61.5)/Gamma(61) stays finite in ratio form
        value = gamma_ratio(61.5, 61.0)
        assert np.isfinite(value)
        assert value == pytest.approx(math.gamma(61.5) / math.gamma(61.0), rel=1e-12)


class TestDerivativeCoeffs:
    def test_shift_and_sign(self):
        # p = L_2^alpha: p' = -L_1^{alpha+1}, p'' = L_0^{alpha+2}
        c = np.array([0.0, 0.0, 1.0])
        np.testing.assert_array_equal(derivative_coeffs(c, 1), [-0.0, -0.0, -1.0][1:])
        np.testing.assert_array_equal(derivative_coeffs(c, 2), [1.0])

    def test_vanishing_beyond_degree(self):
        np.testing.assert_array_equal(derivative_coeffs(np.array([3.0]), 1), [0.0])


class TestApplyA:
    def test_eigenvector(self):
        basis = LaguerreBasis.build(1.0, 5)
        p = basis_poly(3)
        out = laguerre_apply_A(basis, 1.0, 1, p)
        np.testing.assert_allclose(out.coeffs, [0, 0, 0, 4.0])

    def test_action_on_x(self):
        # x = (a+1) L_0 - L_1 and l[x] = -L_1 = x - a - 1
        alpha = 0.5
        basis = LaguerreBasis.build(alpha, 5)
        p = x_poly(basis)
        # apply l = A - k with k = 1: (m + 1 - 1) scaling is just m
        applied = laguerre_apply_A(basis, 1.0, 1, p)
        ell_x = applied.coeffs - p.coeffs          # l[x] = (A - 1)[x]
        np.testing.assert_allclose(ell_x, [0.0, -1.0], atol=1e-14)
        xs = np.linspace(0.0, 4.0, 9)
        values = ell_x @ basis.eval_all(xs)[:2]
        np.testing.assert_allclose(values, xs - alpha - 1.0, atol=1e-12)

    def test_power_zero_identity(self):
        basis = LaguerreBasis.build(1.0, 4)
        p = PolyInLaguerre(np.array([1.0, -2.0, 0.5]))
        np.testing.assert_array_equal(laguerre_apply_A(basis, 2.0, 0, p).coeffs, p.coeffs)


class TestQuadrature:
    def test_one_node_alpha0(self):
        rule = gauss_quadrature(0.0, 1)
        np.testing.assert_allclose(rule.nodes, [1.0], atol=1e-14)
        np.testing.assert_allclose(rule.weights, [1.0], atol=1e-14)

    def test_gamma3_with_two_nodes(self):
        rule = gauss_quadrature(0.0, 2)
        assert rule.integrate_values(rule.nodes ** 2) == pytest.approx(2.0, rel=1e-13)

    def test_weighted_first_moment(self):
        # integral t * t e^{-t} dt = Gamma(3) = 2 under weight t e^{-t}
        rule = gauss_quadrature(1.0, 2)
        assert rule.integrate_values(rule.nodes) == pytest.approx(2.0, rel=1e-13)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.5])
    @pytest.mark.parametrize("m", [1, 2, 4, 8])
    def test_gamma_moment_exactness(self, alpha, m):
        rule = gauss_quadrature(alpha, m)
        for d in range(2 * m):
            moment = rule.integrate_values(rule.nodes ** d)
            exact = math.gamma(d + alpha + 1)
            assert moment == pytest.approx(exact, rel=1e-10)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            gauss_quadrature(-1.0, 3)
        with pytest.raises(ValueError):
            gauss_quadrature(0.0, 0)


class TestDirichletFormSpec:
    def test_build_small(self):
        spec = DirichletFormSpec.build(2, 1.0)
        assert spec.b == (1.0, 3.0, 1.0)

    def test_invariants_enforced(self):
        with pytest.raises(ValueError, match="b_n"):
            DirichletFormSpec(2, 1.0, (1.0, 3.0, 2.0))
        with pytest.raises(ValueError, match="b_0"):
            DirichletFormSpec(2, 1.0, (4.0, 3.0, 1.0))


class TestInnerProducts:
    def test_hand_instance_alpha1_k1_n1(self):
        # p = q = x: dirichlet = Gamma(4) + Gamma(3) = 8, spectral = 4 + 4 = 8
        basis = LaguerreBasis.build(1.0, 4)
        spec = DirichletFormSpec.build(1, 1.0)
        p = x_poly(basis)
        d = dirichlet_inner(spec, basis, p, p)
        s = spectral_inner(basis, 1.0, 1, p, p)
        assert d == pytest.approx(8.0, abs=1e-12)
        assert s == pytest.approx(8.0, abs=1e-12)

    def test_constant_gives_kn_gamma(self):
        alpha, k = 0.5, 2.0
        basis = LaguerreBasis.build(alpha, 4)
        for n in (1, 2, 3):
            spec = DirichletFormSpec.build(n, k)
            d = dirichlet_inner(spec, basis, basis_poly(0), basis_poly(0))
            assert d == pytest.approx(k ** n * math.gamma(alpha + 1), rel=1e-12)

    def test_l0_l1_orthogonal(self):
        basis = LaguerreBasis.build(1.0, 4)
        spec = DirichletFormSpec.build(2, 1.0)
        assert dirichlet_inner(spec, basis, basis_poly(0), basis_poly(1)) == \
            pytest.approx(0.0, abs=1e-12)

    def test_spectral_eigenvector_value(self):
        basis = LaguerreBasis.build(1.0, 6)
        for m in (0, 2, 5):
            value = spectral_inner(basis, 1.0, 3, basis_poly(m), basis_poly(m))
            assert value == pytest.approx((m + 1.0) ** 3 * basis.norm_sq(m), rel=1e-13)

    def test_spectral_orthogonality(self):
        basis = LaguerreBasis.build(1.0, 6)
        assert spectral_inner(basis, 1.0, 2, basis_poly(1), basis_poly(4)) == 0.0

    def test_first_form_identity(self):
        # <Af, g>_H = <f, g>_1: dirichlet with n = 1 against applying A first
        # and then taking the plain weighted inner product (power 0)
        alpha, k = 0.5, 1.0
        basis = LaguerreBasis.build(alpha, 6)
        spec = DirichletFormSpec.build(1, k)
        rng = np.random.default_rng(17)
        for _ in range(5):
            p = PolyInLaguerre(rng.normal(size=5))
            q = PolyInLaguerre(rng.normal(size=6))
            lhs = spectral_inner(basis, k, 0, laguerre_apply_A(basis, k, 1, p), q)
            rhs = dirichlet_inner(spec, basis, p, q)
            assert rhs == pytest.approx(lhs, rel=1e-10, abs=1e-10)


class TestIdentity:
    def test_flagship_case(self):
        assert laguerre_identity_check(0.5, 1.0, 2, 8) <= 1e-8

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_identity_grid(self, alpha, n):
        assert laguerre_identity_check(alpha, 1.0, n, 6) <= 1e-8

    def test_table_rows_shape(self):
        rows = laguerre_identity_table(1.0, 1.0, 1, 3)
        assert len(rows) == 10          # unordered pairs (i <= j) of degrees 0..3
        assert all(len(r) == 8 for r in rows)

    def test_rejects_large_n(self):
        with pytest.raises(ValueError, match="n <= 6"):
            laguerre_identity_check(1.0, 1.0, 7, 4)


class TestJacobiSpectrum:
    def test_alpha_beta_one(self):
        np.testing.assert_allclose(jacobi_spectrum(1.0, 1.0, 3), [0.0, 4.0, 10.0, 18.0])

    def test_zero_start_and_monotone(self):
        lam = jacobi_spectrum(0.5, 2.0, 10)
        assert lam[0] == 0.0
        assert np.all(np.diff(lam) > 0)

    def test_rejects_nonpositive_parameters(self):
        with pytest.raises(ValueError):
            jacobi_spectrum(0.0, 1.0, 3)
