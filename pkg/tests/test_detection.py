import math

import numpy as np
import pytest

import eitbiphoton as eb
from eitbiphoton import kernels
from eitbiphoton.detection import (_evaluator, _fejer_transform, _plateau,
                                   _strict_local_minima, dip_metrics, scan)
from eitbiphoton.quadrature import integrate
from eitbiphoton.presets import get_preset


def triangle(delta_tau, dl):
    return 1.0 - max(0.0, 1.0 - abs(dl - 2 * delta_tau) / dl)


class TestSinglesSpectrum:
    def test_resonant_center(self, rb87, spdc):
        assert eb.singles_spectrum(0.0, rb87, spdc) == 1.0

    def test_no_medium_is_envelope(self, spdc):
        for nu in (0.0, 1e11, -3e12):
            assert eb.singles_spectrum(nu, None, spdc) \
                == eb.unfiltered_spectrum(nu, spdc)

    def test_vacuum_medium_matches_none(self, spdc):
        vac = eb.MediumParams(0.0, 0.0, 1.0, 1.0, spdc.W_s, 0.1)
        for nu in (0.0, 2e9, -7e11):
            assert eb.singles_spectrum(nu, vac, spdc) \
                == pytest.approx(eb.singles_spectrum(nu, None, spdc), rel=1e-14)

    def test_two_dips_at_autler_townes(self, rb87, spdc):
        p = get_preset("fig3b")
        grid = np.array(p.grid())
        sc = scan("singles_spectrum", grid, rb87, spdc, normalization="peak=1")
        minima = _strict_local_minima(sc.values)
        assert len(minima) == 2
        wc = rb87.omega_c_rabi
        pos = sorted(grid[i] for i in minima)
        assert abs(-wc - pos[0]) < 0.05 * wc
        assert abs(wc - pos[1]) < 0.05 * wc


class TestSinglesRate:
    def test_transparent_total(self, spdc):
        assert eb.singles_rate(None, spdc, tol=1e-9) \
            == pytest.approx(2 * math.pi / spdc.Dl, rel=1e-8)

    def test_eit_removes_weight(self, rb87, spdc):
        r = eb.singles_rate(rb87, spdc, tol=1e-8)
        full = 2 * math.pi / spdc.Dl
        assert r < full
        # dense-grid oracle for the removed weight; the grid must reach far
        # enough that the 1/nu^2 absorption wings are inside it
        grid = np.linspace(-4e12, 4e12, 2_000_001)
        s = kernels.singles_integrand(grid, rb87, spdc)
        s0 = kernels.sinc2_array(grid * spdc.Dl / 2)
        removed_grid = np.trapezoid(s0 - s, grid)
        # remaining wings beyond the grid: 2 * 2qK gamma_c / nu_max
        q2 = spdc.W_s * rb87.cell_length_L / rb87.constants.c
        wings = 2 * q2 * rb87.prefactor_K * rb87.gamma_c / 4e12
        assert full - r == pytest.approx(removed_grid + wings, rel=2e-3)

    def test_opaque_limit(self, spdc):
        # a cell opaque across the whole band: rate collapses
        m = eb.MediumParams(5e9, 1e6, 1e13, 1e12, spdc.W_s, 10.0)
        r = eb.singles_rate(m, spdc, tol=1e-6)
        assert r < 1e-2 * 2 * math.pi / spdc.Dl


class TestBaseline:
    def test_notch_zero(self, spdc):
        assert eb.baseline_rate(spdc.Dl / 2, spdc, tol=1e-10) \
            == pytest.approx(0.0, abs=1e-4 * 2 * math.pi / spdc.Dl)

    def test_half_depth(self, spdc):
        assert eb.baseline_rate(spdc.Dl / 4, spdc, tol=1e-10) \
            == pytest.approx(math.pi / spdc.Dl, rel=1e-8)

    def test_plateau_edge(self, spdc):
        assert eb.baseline_rate(0.0, spdc, tol=1e-10) \
            == pytest.approx(2 * math.pi / spdc.Dl, rel=1e-8)

    def test_triangle_shape(self, spdc):
        grid = np.linspace(-spdc.Dl, 2 * spdc.Dl, 201)
        sc = scan("baseline_rate", grid, None, spdc, tol=1e-9,
                  normalization="plateau=1", workers=1)
        ref = np.array([triangle(x, spdc.Dl) for x in grid])
        assert np.max(np.abs(sc.values - ref)) < 1e-6

    def test_time_reversal_symmetry(self, spdc):
        scale = 2 * math.pi / spdc.Dl
        for u in (0.1e-12, 0.7e-12, 1.9e-12, 3.3e-12):
            a = eb.baseline_rate(spdc.Dl / 2 + u, spdc, tol=1e-10)
            b = eb.baseline_rate(spdc.Dl / 2 - u, spdc, tol=1e-10)
            assert abs(a - b) <= 1e-9 * scale

    def test_requires_degenerate(self):
        nd = eb.SpdcParams(Dl=3e-12, W_s=1.0e15, W_i=1.2e15, omega_pump=2.2e15)
        with pytest.raises(ValueError):
            eb.baseline_rate(0.0, nd, tol=1e-7)

    def test_nonnegative_noise_floor(self, spdc):
        v = eb.baseline_rate(spdc.Dl / 2, spdc, tol=1e-9)
        assert v >= -1e-9 * 2 * math.pi / spdc.Dl

    def test_worker_pool_matches_serial(self, spdc):
        grid = np.linspace(-spdc.Dl, 2 * spdc.Dl, 17)
        s1 = scan("baseline_rate", grid, None, spdc, tol=1e-8, workers=1)
        s2 = scan("baseline_rate", grid, None, spdc, tol=1e-8, workers=2)
        assert s1.values.tolist() == s2.values.tolist()


class TestFejer:
    def test_matches_gk_degenerate(self, spdc):
        # closed form vs adaptive GK of the raw product, complex integrand
        for dt in (0.2e-12, 1.1e-12, 2.9e-12):
            f = lambda nu: (np.conj(kernels.phi_array(nu * spdc.Dl))
                            * kernels.phi_array(-nu * spdc.Dl)
                            * np.exp(2j * nu * dt))
            m = 60.0 / spdc.Dl
            gk = integrate(f, -m, m, rel_tol=1e-9, abs_tol=1.0,
                           max_phase_slope=2 * dt + 2 * spdc.Dl)
            ref = _fejer_transform(spdc, dt)
            # GK runs on a finite window: tolerate its 1/M tail
            assert complex(gk.value) == pytest.approx(ref, abs=0.02 * abs(ref)
                                                      if ref else 2e9)

    def test_support(self, spdc):
        assert _fejer_transform(spdc, -1e-12) == 0
        assert _fejer_transform(spdc, spdc.Dl + 1e-15) == 0
        assert abs(_fejer_transform(spdc, spdc.Dl / 2)
                   - 2 * math.pi / spdc.Dl) < 1e-3


class TestCoincidence:
    def test_medium_removal_reduction(self, spdc):
        # Eq for T == 1 must collapse onto the medium-free baseline
        plateau = 2 * math.pi / spdc.Dl
        grid = np.linspace(-spdc.Dl, 2 * spdc.Dl, 51)
        worst = 0.0
        for dt in grid:
            a = eb.coincidence_rate(float(dt), None, spdc, tol=1e-9)
            b = eb.baseline_rate(float(dt), spdc, tol=1e-10)
            worst = max(worst, abs(a - b) / plateau)
        assert worst < 1e-9

    def test_vacuum_medium_equals_none(self, spdc):
        vac = eb.MediumParams(0.0, 0.0, 1.0, 1.0, spdc.W_s, 0.1)
        for dt in (0.0, 0.3e-12, 5e-9):
            assert eb.coincidence_rate(dt, vac, spdc) \
                == pytest.approx(eb.coincidence_rate(dt, None, spdc), rel=1e-12)

    def test_split_vs_direct_full_band(self, rb87, spdc):
        # the Fejer+Filon split against one adaptive pass over the raw
        # integrand, at delays where the brute route is affordable
        ev = _evaluator(rb87, spdc, 1e-7)
        for dt in (-0.15e-9, 0.0, 0.12e-9):
            direct = eb.coincidence_rate_direct(dt, rb87, spdc, tol=3e-7,
                                                envelope_halfwidth=3e13)
            assert ev.rate(dt) == pytest.approx(direct, abs=1e-6 * ev.c1)

    def test_eq_27_resonant_form(self, rb87, spdc):
        # degenerate resonant printed form with the running-frequency
        # phase delay phi_d(nu) = chi'(+nu) W_s L / (2c)
        qs = spdc.W_s * rb87.cell_length_L / (2 * rb87.constants.c)
        a = spdc.Dl / 2

        def eq27(nu, dt):
            chi = kernels.chi_array(nu, rb87)  # Delta = +nu convention
            phi_d = chi.real * qs
            mag = np.exp(-chi.imag * spdc.W_s * rb87.cell_length_L
                         / rb87.constants.c)
            return kernels.sinc2_array(nu * a) * mag * (
                1.0 - np.cos(nu * (spdc.Dl - 2 * dt) - 2 * phi_d))

        from eitbiphoton.detection import _eit_hints
        ev = _evaluator(rb87, spdc, 1e-7)
        from eitbiphoton.quadrature import SincSquaredTail, infinite_domain_wrap
        for dt in (-0.1e-9, 0.0, 0.08e-9):
            b = abs(spdc.Dl - 2 * dt)
            rep = infinite_domain_wrap(
                lambda nu: eq27(nu, dt), 4e13, rel_tol=5e-7,
                abs_tol=1.0, hints=_eit_hints(rb87, spdc),
                tail=SincSquaredTail(a, ((1.0, 0.0), (-1.0, b))),
                max_phase_slope=b)
            assert rep.converged
            assert ev.rate(dt) == pytest.approx(float(rep.value),
                                                abs=1e-6 * ev.c1)

    def test_filtered_split_vs_direct(self, rb87, spdc, coincidence_filter):
        for dt in (0.0, 3e-9, 9.07e-9, -12e-9, 25e-9):
            d = eb.coincidence_rate_direct(dt, rb87, spdc, tol=1e-9,
                                           input_filter=coincidence_filter)
            s = eb.coincidence_rate(dt, rb87, spdc, tol=1e-7,
                                    input_filter=coincidence_filter)
            assert s == pytest.approx(d, rel=1e-7)

    def test_filtered_dip_structure(self, fig5b_scan, rb87, spdc):
        m = dip_metrics(fig5b_scan, rb87, spdc)
        s = eb.slow_light_summary(rb87, rb87.omega_ac)
        expected = spdc.Dl / 2 + s.tau_d
        assert abs(m.dip_center - expected) < 0.02 * expected
        assert m.dip_depth > 0.9
        assert m.predicted_oscillation_flag

    def test_nonconvergence_is_loud(self, rb87, spdc):
        with pytest.raises(eb.QuadratureError):
            eb.coincidence_rate_direct(10e-9, rb87, spdc, tol=1e-13,
                                       envelope_halfwidth=2.0 / spdc.Dl)


class TestBiphoton:
    def test_rectangle_no_medium(self, spdc):
        plateau = 2 * math.pi / spdc.Dl
        assert abs(eb.biphoton_amplitude(spdc.Dl / 2, 0.0, None, spdc)) \
            == pytest.approx(plateau, rel=1e-6)
        assert abs(eb.biphoton_amplitude(-spdc.Dl, 0.0, None, spdc)) \
            < 1e-3 * plateau
        assert abs(eb.biphoton_amplitude(2 * spdc.Dl, 0.0, None, spdc)) \
            < 1e-3 * plateau

    def test_unfiltered_medium_against_brute(self, rb87, spdc):
        # small kappa: the brute Fourier integral over the correction is
        # affordable and validates the near/far channel decomposition
        plateau = 2 * math.pi / spdc.Dl
        for kap in (0.2 * spdc.Dl, -0.4 * spdc.Dl):
            f = lambda nu: kernels.biphoton_correction(nu, rb87, spdc) \
                * np.exp(-1j * nu * kap)
            m = 4e14
            gk = integrate(f, -m, m, rel_tol=1e-6, abs_tol=1e-4 * plateau,
                           hint_breakpoints=[-rb87.omega_c_rabi,
                                             rb87.omega_c_rabi],
                           max_phase_slope=abs(kap) + 2 * spdc.Dl)
            rect = plateau if 0 < kap < spdc.Dl else 0.0
            brute = rect + complex(gk.value)
            smart = eb.biphoton_amplitude(kap, 0.0, rb87, spdc, tol=1e-5)
            assert smart == pytest.approx(brute, abs=3e-4 * plateau)

    def test_delayed_support_with_filter(self, rb87, spdc, coincidence_filter):
        s = eb.slow_light_summary(rb87, rb87.omega_ac)
        kappas = np.linspace(-5e-9, 25e-9, 121)
        vals = [abs(eb.biphoton_amplitude(float(k), 0.0, rb87, spdc,
                                          input_filter=coincidence_filter))
                for k in kappas]
        peak = max(vals)
        at_delay = abs(eb.biphoton_amplitude(float(s.tau_d), 0.0, rb87, spdc,
                                             input_filter=coincidence_filter))
        assert at_delay > 0.1 * peak
        # the envelope is a delayed pulse: its maximum sits near tau_d
        assert abs(kappas[int(np.argmax(vals))] - s.tau_d) < 2e-9


class TestScan:
    def test_grid_validation(self, spdc):
        with pytest.raises(ValueError):
            scan("baseline_rate", [0.0], None, spdc)
        with pytest.raises(ValueError):
            scan("baseline_rate", [0.0, 0.0], None, spdc)
        with pytest.raises(ValueError):
            scan("bogus", [0.0, 1.0], None, spdc)

    def test_normalizations(self, spdc):
        grid = np.linspace(-spdc.Dl, 2 * spdc.Dl, 31)
        raw = scan("baseline_rate", grid, None, spdc, tol=1e-8, workers=1)
        peak = scan("baseline_rate", grid, None, spdc, tol=1e-8,
                    normalization="peak=1", workers=1)
        assert peak.values.max() == 1.0
        div = peak.params_fingerprint["normalization_divisor"]
        assert np.allclose(raw.values, peak.values * div, rtol=1e-14)

    def test_fingerprint_round_trip(self, rb87, spdc, coincidence_filter):
        grid = np.linspace(-1e-9, 1e-9, 5)
        sc = scan("coincidence_rate", grid, rb87, spdc, tol=1e-7,
                  input_filter=coincidence_filter)
        fp = sc.params_fingerprint
        assert fp["medium"]["prefactor_K"] == rb87.prefactor_K
        assert fp["spdc"]["Dl"] == spdc.Dl
        assert fp["input_filter_half_width"] == coincidence_filter.half_width

    def test_singles_scan_matches_pointwise(self, spdc):
        grid = np.linspace(-2e12, 2e12, 21)
        sc = scan("singles_spectrum", grid, None, spdc)
        ref = [eb.singles_spectrum(float(x), None, spdc) for x in grid]
        assert sc.values.tolist() == ref


class TestDipMetrics:
    def test_baseline_notch(self, spdc):
        grid = np.linspace(-spdc.Dl, 2 * spdc.Dl, 201)
        sc = scan("baseline_rate", grid, None, spdc, tol=1e-9,
                  normalization="plateau=1", workers=1)
        m = dip_metrics(sc, None, spdc)
        step = grid[1] - grid[0]
        assert abs(m.dip_center - spdc.Dl / 2) <= step
        assert m.dip_depth == pytest.approx(1.0, abs=1e-6)
        assert m.oscillation_count == 0

    def test_flat_scan_error(self, spdc):
        flat = eb.ScanResult("delta_tau",
                             tuple((float(i), 1.0) for i in range(20)),
                             {}, "raw")
        with pytest.raises(ValueError):
            dip_metrics(flat, None, spdc)

    def test_fig5b_oscillations(self, fig5b_scan, rb87, spdc):
        m = dip_metrics(fig5b_scan, rb87, spdc)
        x, v = fig5b_scan.abscissa, fig5b_scan.values
        plat = _plateau(v)
        thresh = 0.01 * (plat - v.min())
        from eitbiphoton.detection import _strict_local_maxima
        neg = [i for i in _strict_local_maxima(v)
               if x[i] < 0 and abs(v[i] - plat) > thresh]
        assert len(neg) >= 3
        assert m.oscillation_count >= 3

    def test_criterion_agreement(self, fig5b_scan, rb87, spdc):
        frac = eb.oscillation_segment_agreement(fig5b_scan, rb87, spdc,
                                                n_segments=8)
        assert frac >= 0.95

    def test_detuned_visibility_lower(self, fig5b_scan, fig6_scan, rb87,
                                      rb87_detuned, spdc):
        m5 = dip_metrics(fig5b_scan, rb87, spdc)
        m6 = dip_metrics(fig6_scan, rb87_detuned, spdc)
        assert m6.dip_depth < m5.dip_depth
