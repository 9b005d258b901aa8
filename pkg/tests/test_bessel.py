"""Special-function tests: both Bessel routes against each other and an
independent library evaluation, the sign identity, modulus bounds, the
kernel against its integral representation, Graf addition residuals,
Gaussian Fourier moments, Poisson summation, and the singular angular
integral."""

from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest

from zisieve.bessel import (
    GaussianPolyFamily,
    bessel_j_int,
    bessel_j_star,
    gauss_fourier_G,
    gauss_fourier_quad,
    graf_residual,
    jcal,
    kernel_K,
    kernel_K_integral,
    laplacian_decay_report,
    lemma48_sweep,
    poisson_check_2d,
    psi_kernel,
)

SAMPLE_Z = [0.5, 3.0, -2.0 + 1.5j, 7.0 - 0.5j, 1j, 12.0 + 2.0j, 25.0]


class TestBesselJ:
    def test_j0_at_zero(self):
        assert abs(bessel_j_int(0, 0.0) - 1.0) < 1e-14

    def test_negative_order_sign_identity(self):
        for n in [1, 2, 3, 7]:
            for z in SAMPLE_Z:
                a = bessel_j_int(-n, z)
                b = (-1) ** n * bessel_j_int(n, z)
                scale = max(1.0, abs(b))
                assert abs(a - b) / scale < 1e-12
                c = bessel_j_int(n, -z)
                assert abs(a - c) / scale < 1e-12

    def test_modulus_bounds(self):
        # |J_n(z)| <= min(e^{|Im z|}, |z/2|^n/n! e^{|z|}), strict with margin
        for n in [0, 1, 2, 5, 9]:
            for z in SAMPLE_Z:
                v = abs(bessel_j_int(n, z))
                z = complex(z)
                b1 = math.exp(abs(z.imag))
                b2 = abs(z / 2) ** n / math.factorial(n) * math.exp(abs(z))
                assert v <= min(b1, b2) * (1 + 1e-12)

    def test_real_bound_unity(self):
        for n in range(0, 12):
            for x in [0.3, 1.0, 4.7, 19.0, 28.0]:
                assert abs(bessel_j_int(n, x)) <= 1.0 + 1e-12

    def test_against_mpmath_oracle(self):
        for n in [0, 1, 4, 11]:
            for z in SAMPLE_Z + [55.0, 40.0 + 9.0j, 200.0]:
                mine = bessel_j_int(n, z)
                ref = complex(mpmath.besselj(n, z))
                scale = max(1.0, abs(ref))
                assert abs(mine - ref) / scale < 1e-10, (n, z)

    def test_large_real_decay_envelope(self):
        # |J_n(z)| * |Re z|^{1/2} * e^{-|Im z|} stays bounded well inside the
        # oscillatory regime
        worst = 0.0
        for n in [0, 1, 3]:
            for re in [10.0 * (n * n + 1), 60.0, 150.0, 400.0]:
                for im in [0.0, 1.0]:
                    z = complex(re, im)
                    v = abs(bessel_j_int(n, z)) * math.sqrt(abs(re)) * math.exp(-abs(im))
                    worst = max(worst, v)
        assert worst < 2.0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            bessel_j_int(500, 1.0)
        with pytest.raises(ValueError):
            bessel_j_int(1, 1000.0)


class TestBesselStar:
    def test_value_at_zero(self):
        for xi in [0.5, 1.0, 2.3 + 1j, -0.7]:
            v = bessel_j_star(xi, 0.0)
            ref = complex(mpmath.rgamma(xi + 1))
            assert abs(v - ref) < 1e-13

    def test_even_in_z(self):
        for xi in [0.3 + 0.8j, -1.2, 2.0]:
            for z in [1.0, 2.0 - 1.0j, 0.5j]:
                assert abs(bessel_j_star(xi, z) - bessel_j_star(xi, -z)) < 1e-13

    def test_matches_integer_bessel(self):
        for n in [0, 1, 3, 6]:
            for z in [0.5, 2.0, 5.0 - 1.0j, 9.0]:
                z = complex(z)
                lhs = (z / 2) ** n * bessel_j_star(n, z)
                rhs = bessel_j_int(n, z)
                assert abs(lhs - rhs) / max(1.0, abs(rhs)) < 1e-10

    def test_negative_integer_order_leading_zeros(self):
        # 1/Gamma at nonpositive integers vanishes: J*_{-2} has no m=0,1 terms
        z = 1.7
        v = bessel_j_star(-2, z)
        series = sum(
            (-1) ** m * (z / 2) ** (2 * m) / (math.factorial(m) * math.gamma(m - 1))
            for m in range(2, 40)
        )
        assert abs(v - series) < 1e-13

    def test_domain_error(self):
        with pytest.raises(ValueError):
            bessel_j_star(0.5, 70.0)


class TestKernel:
    def test_parity_in_z(self):
        for nu, p in [(0.3j, 0), (0.1 + 0.2j, 1), (0.05j, 2)]:
            for z in [1.0 + 0.5j, 2.0, 0.7j]:
                assert abs(kernel_K(nu, p, z) - kernel_K(nu, p, -z)) < 1e-12

    def test_invariance_under_sign_flip(self):
        for nu, p in [(0.17j, 1), (0.1 + 0.05j, 2)]:
            for z in [1.5, 2.0 + 1.0j]:
                a = kernel_K(nu, p, z)
                b = kernel_K(-nu, -p, z)
                assert abs(a - b) < 1e-12

    def test_integral_representation(self):
        nu, p = 0.1j, 1
        z = 2.0 * cmath.exp(1j * math.pi / 5)
        series = kernel_K(nu, p, z)
        integral = kernel_K_integral(nu, p, z)
        assert abs(series - integral) < 1e-8

    def test_integral_representation_second_point(self):
        nu, p = 0.06 + 0.2j, 0
        z = 1.3 * cmath.exp(-1j * 0.4)
        assert abs(kernel_K(nu, p, z) - kernel_K_integral(nu, p, z)) < 1e-8

    def test_integer_nu_continuity(self):
        for p in [0, 1]:
            z = 1.2 + 0.8j
            center = kernel_K(1, p, z)
            for eps in (2e-5, 1e-5):
                sym = 0.5 * (kernel_K(1 + eps, p, z) + kernel_K(1 - eps, p, z))
                assert abs(center - sym) < 1e-8

    def test_domain_error_at_zero(self):
        with pytest.raises(ValueError):
            kernel_K(0.1j, 0, 0.0)


class TestGraf:
    def test_neumann_case(self):
        assert graf_residual(0, 3.0, 1.0, 60) < 1e-10

    def test_rotated_case(self):
        u = 2.0 * cmath.exp(1j * math.pi / 6)
        assert graf_residual(1, u, 1.3, 40) < 1e-10

    def test_singular_configuration_rejected(self):
        with pytest.raises(ValueError):
            graf_residual(1, 1j, 1.0, 20)  # theta = pi/2, y = 1: zeta = 0

    def test_grid_small(self):
        for p in [-2, 0, 2]:
            for u in [1.5, 2.5 * cmath.exp(0.9j)]:
                for y in [0.6, 1.7]:
                    assert graf_residual(p, u, y, 70) < 1e-10


class TestGaussFourier:
    def test_seed_values(self):
        assert abs(gauss_fourier_G(0, 0.0) - math.sqrt(math.pi)) < 1e-14
        assert abs(gauss_fourier_G(1, 0.0)) < 1e-14
        assert abs(gauss_fourier_G(2, 0.0) - math.sqrt(math.pi) / 2) < 1e-14

    def test_recurrence_matches_quadrature(self):
        for n in [0, 1, 2, 3, 6]:
            for y in [0.0, 0.8, -2.5]:
                a = gauss_fourier_G(n, y)
                b = gauss_fourier_quad(n, y)
                assert abs(a - b) < 1e-10, (n, y)

    def test_parity(self):
        for m in range(0, 4):
            for y in [0.4, 1.3]:
                even = gauss_fourier_G(2 * m, y)
                odd = gauss_fourier_G(2 * m + 1, y)
                assert abs(even.imag) < 1e-12
                assert abs(odd.real) < 1e-12


class TestPoisson:
    def test_self_dual_gaussian(self):
        f = GaussianPolyFamily(t=math.pi)
        lhs, rhs = poisson_check_2d(f)
        theta = sum(math.exp(-math.pi * n * n) for n in range(-12, 13))
        assert abs(lhs - theta**2) < 1e-12
        assert abs(lhs - rhs) < 1e-10

    def test_narrow_gaussian(self):
        f = GaussianPolyFamily(t=2 * math.pi)
        lhs, rhs = poisson_check_2d(f)
        direct = 0.5 * sum(
            math.exp(-math.pi * (a * a + b * b) / 2.0)
            for a in range(-15, 16)
            for b in range(-15, 16)
        )
        assert abs(rhs - direct) < 1e-10
        assert abs(lhs - rhs) < 1e-10

    def test_polynomial_weights(self):
        f = GaussianPolyFamily(t=1.5, coeffs=(1.0, -0.3, 0.05))
        lhs, rhs = poisson_check_2d(f)
        assert abs(lhs - rhs) < 1e-10

    def test_laplacian_decay(self):
        f = GaussianPolyFamily(t=2.0, coeffs=(1.0, 0.2))
        report = laplacian_decay_report(f, j_max=3)
        assert not report.violations()

    def test_transform_consistency_with_quadrature(self):
        # check fhat(w) against a direct 2-D integral at a sample point
        f = GaussianPolyFamily(t=1.1, coeffs=(0.7, 0.4))
        fhat = f.transform()
        w = 0.6 + 0.3j
        xs = np.linspace(-7, 7, 1401)
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        vals = f.value_rho(X * X + Y * Y) * np.exp(-2j * np.pi * (w.real * X - w.imag * Y))
        trap = getattr(np, "trapezoid", None) or np.trapz
        direct = trap(trap(vals, xs, axis=1), xs)
        assert abs(direct - fhat.value(w)) < 1e-8


class TestAngularIntegral:
    def test_symmetric_in_y(self):
        rep1 = lemma48_sweep([0.3], [0.8])
        rep2 = lemma48_sweep([0.3], [-0.8])
        assert abs(rep1.rows[0].lhs - rep2.rows[0].lhs) < 1e-7

    def test_reference_value_at_origin(self):
        # psi(0, 0; phi) = 2 sin(phi): J = 2^{-1/2} * 4 * int_0^{pi/2} (sin)^(-1/2)
        rep = lemma48_sweep([0.0], [0.0])
        beta = math.gamma(0.25) * math.gamma(0.5) / math.gamma(0.75)
        expected = (2.0) ** -0.5 * 2.0 * beta
        assert abs(rep.rows[0].lhs - expected) < 1e-6

    def test_ratio_stable_toward_edge(self):
        xs = [0.0, 0.6, 1.2, 1.5, 1.55]
        rep = lemma48_sweep(xs, [0.0, 1.0])
        max_ratio, _ = rep.max_ratio()
        assert max_ratio < 12.0
        assert not rep.blowup_flag("x")

    def test_rejects_bad_x(self):
        with pytest.raises(ValueError):
            lemma48_sweep([1.6], [0.0])
