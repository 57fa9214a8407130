import math

import numpy as np
import pytest

from eitbiphoton import SpdcParams, phase_matching, unfiltered_spectrum
from eitbiphoton.quadrature import SincSquaredTail, infinite_domain_wrap


@pytest.fixture
def params():
    return SpdcParams.degenerate(3e-12, 2 * 2.369e15)


class TestParams:
    def test_frequency_phase_matching_exact(self):
        with pytest.raises(ValueError):
            SpdcParams(Dl=1e-12, W_s=1.0, W_i=1.0, omega_pump=2.0 + 1e-9)

    def test_product_consistency(self):
        SpdcParams(Dl=6e-12, W_s=1.0, W_i=1.0, omega_pump=2.0, D=2e-9, l=3e-3)
        with pytest.raises(ValueError):
            SpdcParams(Dl=6e-12, W_s=1.0, W_i=1.0, omega_pump=2.0,
                       D=2e-9, l=4e-3)

    def test_degenerate(self, params):
        assert params.is_degenerate
        assert params.W_s == params.omega_pump / 2


class TestPhaseMatching:
    def test_limit_at_zero(self):
        assert phase_matching(0.0) == 1.0 + 0.0j

    def test_zero_at_two_pi(self):
        assert abs(phase_matching(2 * math.pi)) < 1e-15

    def test_at_pi(self):
        # |1 - e^{i pi}|^2 / pi^2 = 4/pi^2
        assert abs(phase_matching(math.pi))**2 == pytest.approx(4 / math.pi**2,
                                                                rel=1e-12)

    def test_taylor_crossover_continuity(self):
        # reference is the cancellation-free closed form e^{ix/2} sinc(x/2)
        for x in (1e-4 * (1 - 1e-9), 1e-4 * (1 + 1e-9), -1e-4 * (1 - 1e-9)):
            exact = np.exp(1j * x / 2) * np.sinc(x / (2 * np.pi))
            assert abs(phase_matching(x) - exact) < 1e-14

    def test_matches_spectrum_identity(self, params):
        # |Phi(nu Dl)|^2 = sinc^2(nu Dl/2) over x = nu Dl in [-50, 50]
        x = np.linspace(-50.0, 50.0, 10_000)
        nu = x / params.Dl
        lhs = np.abs(phase_matching(x))**2
        rhs = unfiltered_spectrum(nu, params)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestSpectrum:
    def test_limits(self, params):
        assert unfiltered_spectrum(0.0, params) == 1.0
        assert unfiltered_spectrum(2 * math.pi / params.Dl, params) \
            == pytest.approx(0.0, abs=1e-30)
        assert unfiltered_spectrum(math.pi / params.Dl, params) \
            == pytest.approx((2 / math.pi)**2, rel=1e-12)

    def test_total_weight(self, params):
        # int S0 = 2 pi / Dl
        a = params.Dl / 2
        rep = infinite_domain_wrap(
            lambda nu: unfiltered_spectrum(nu, params), 2.0 / params.Dl,
            abs_tol=1.0, rel_tol=1e-9,
            hints=[s * 2 * math.pi * k / params.Dl
                   for k in range(1, 9) for s in (1, -1)],
            tail=SincSquaredTail(a))
        assert rep.converged
        assert rep.value == pytest.approx(2 * math.pi / params.Dl, rel=1e-8)
