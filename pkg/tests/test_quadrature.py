import math

import numpy as np
import pytest

from eitbiphoton.quadrature import (SincSquaredTail, infinite_domain_wrap,
                                    integrate)

# frozen with mpmath at 40 digits
SINC2_M200_200 = 3.1366032568544108      # int_{-200}^{200} sinc^2(u) du
GAUSS_M8_8 = 1.7724538509055160          # int_{-8}^{8} e^{-u^2} du
TWOSCALE_INF = 3.1412785152673383        # two-scale notch, a=1, Gamma=1e-4


def sinc2(u):
    return np.sinc(u / np.pi) ** 2


class TestIntegrate:
    def test_sinc2_oracle(self):
        rep = integrate(sinc2, -200.0, 200.0, rel_tol=1e-10, abs_tol=1e-14,
                        hint_breakpoints=[k * math.pi for k in range(-63, 64)])
        assert rep.converged
        assert abs(rep.value - SINC2_M200_200) <= 1e-8 * SINC2_M200_200
        assert abs(rep.value - SINC2_M200_200) <= rep.abs_error_estimate

    def test_gaussian_oracle(self):
        rep = integrate(lambda u: np.exp(-u * u), -8.0, 8.0, rel_tol=1e-12)
        assert rep.converged
        assert abs(rep.value - GAUSS_M8_8) <= 1e-10 * GAUSS_M8_8
        assert abs(rep.value - GAUSS_M8_8) <= rep.abs_error_estimate

    def test_validation(self):
        with pytest.raises(ValueError):
            integrate(sinc2, 1.0, 0.0)
        with pytest.raises(ValueError):
            integrate(sinc2, 0.0, 1.0, rel_tol=-1.0)

    def test_complex_integrand(self):
        rep = integrate(lambda u: np.exp(1j * u), 0.0, math.pi / 2, rel_tol=1e-12)
        assert rep.value == pytest.approx(1.0 + 1.0j, rel=1e-12)

    def test_deterministic(self):
        r1 = integrate(sinc2, -50.0, 50.0, rel_tol=1e-9)
        r2 = integrate(sinc2, -50.0, 50.0, rel_tol=1e-9)
        assert r1.value == r2.value
        assert r1.abs_error_estimate == r2.abs_error_estimate
        assert r1.subdivisions == r2.subdivisions

    def test_redundant_breakpoints_harmless(self):
        base = integrate(sinc2, -50.0, 50.0, rel_tol=1e-9)
        extra = integrate(sinc2, -50.0, 50.0, rel_tol=1e-9,
                          hint_breakpoints=[-17.3, 0.01, 21.9, 33.333])
        assert extra.converged
        assert abs(extra.value - base.value) <= 1e-9 * abs(base.value)

    def test_doubling_cap_stable(self):
        r1 = integrate(sinc2, -50.0, 50.0, rel_tol=1e-9,
                       max_subdivisions=10**6)
        r2 = integrate(sinc2, -50.0, 50.0, rel_tol=1e-9,
                       max_subdivisions=2 * 10**6)
        assert abs(r1.value - r2.value) <= r1.abs_error_estimate

    def test_nonconvergence_reported(self):
        # cap the subdivisions so a rough integrand cannot converge
        rep = integrate(lambda u: np.cos(1e4 * u), 0.0, 1.0, rel_tol=1e-13,
                        abs_tol=1e-18, max_subdivisions=4)
        assert not rep.converged

    def test_phase_slope_presplit(self):
        # heavily oscillatory cosine resolved by the pre-split
        w = 2e4
        rep = integrate(lambda u: np.cos(w * u), 0.0, 1.0, rel_tol=1e-10,
                        abs_tol=1e-12, max_phase_slope=w)
        assert rep.converged
        assert rep.value == pytest.approx(math.sin(w) / w, abs=1e-12)


class TestInfiniteWrap:
    def test_two_scale_notch(self):
        g = 1e-4
        f = lambda u: (1 - g**2 / (u**2 + g**2)) * sinc2(u)
        rep = infinite_domain_wrap(
            f, 1.0, rel_tol=1e-9, abs_tol=1e-12,
            hints=[-10 * g, 10 * g] + [k * math.pi for k in range(-8, 9) if k],
            tail=SincSquaredTail(1.0))
        assert rep.converged
        assert abs(rep.value - TWOSCALE_INF) <= rep.abs_error_estimate
        # the stated analytic form pi - pi*Gamma holds to 1e-6 relative
        assert rep.value == pytest.approx(math.pi - math.pi * g, rel=1e-6)
        assert rep.value == pytest.approx(TWOSCALE_INF, rel=1e-9)

    def test_zero_integrand(self):
        rep = infinite_domain_wrap(lambda u: np.zeros_like(u), 1.0,
                                   abs_tol=1e-12, rel_tol=1e-9)
        assert rep.converged
        assert rep.value == 0.0

    def test_crude_tail_bound_without_model(self):
        # 1/(1+u^2): true integral pi; bound must cover the cut tails
        f = lambda u: 1.0 / (1.0 + u * u)
        rep = infinite_domain_wrap(f, 1.0, rel_tol=1e-10, abs_tol=1e-12)
        assert not rep.converged  # tails ~ 2/M are far above 1e-10 relative
        assert abs(rep.value - math.pi) <= rep.abs_error_estimate

    def test_sinc2_tail_model_exact(self):
        a = 1.7
        rep = infinite_domain_wrap(
            lambda u: np.sinc(a * u / np.pi)**2, 1.0 / a,
            rel_tol=1e-9, abs_tol=1e-12,
            hints=[k * math.pi / a for k in range(-8, 9) if k],
            tail=SincSquaredTail(a))
        assert rep.converged
        assert rep.value == pytest.approx(math.pi / a, rel=1e-9)

    def test_cos_modulated_tail_model(self):
        a, b = 1.0, 0.6
        f = lambda u: sinc2(u) * (1 - np.cos(b * u))
        rep = infinite_domain_wrap(
            f, 1.0, rel_tol=1e-9, abs_tol=1e-12,
            hints=[k * math.pi for k in range(-8, 9) if k],
            tail=SincSquaredTail(a, ((1.0, 0.0), (-1.0, b))),
            max_phase_slope=b)
        assert rep.converged
        # int sinc^2(u)(1 - cos(bu)) du = pi - pi*(1 - b/2) = pi*b/2 for b<2
        assert rep.value == pytest.approx(math.pi * b / 2, rel=1e-8)
