"""Three-level Lambda medium: susceptibility, transmission and slow light.

Model summary (basis order {|a>, |c>, |b>}, all rates in rad/s):

    H/hbar = [[0,    Wp*,          0  ],
              [Wp,   D - i*gc,     Wc*],
              [0,    Wc,           D - i*gb]]

with probe Rabi frequency Wp, coupling Rabi frequency Wc, one-photon
detuning D and decay rates gc (excited state) and gb (lower metastable
state).  The weak-probe eigenvalue gives the linear susceptibility

    chi(D) = K (D - i*gb) / ((D - i*gc)(D - i*gb) - |Wc|^2),

where K = N |mu|^2 / (hbar eps0) is the only combination of density and
dipole moment that ever appears, so it is the model parameter.

Detuning sign convention: D = omega_ac - omega_probe.  The probe carrier
sits at omega_probe = W_s + nu, so D(nu) = omega_ac - W_s - nu.  With this
convention the transmission phase slope d(arg T)/dnu at resonance is +tau_d,
i.e. the cell delays the probe, which is what fixes every sign downstream.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .constants import CODATA, PhysicalConstants

__all__ = [
    "MediumParams",
    "Susceptibility",
    "Transmission",
    "SlowLightSummary",
    "PolarizationCheck",
    "DegenerateDenominatorError",
    "OpaqueCellError",
    "CalibrationError",
    "hamiltonian",
    "eigenvalue_zeta",
    "susceptibility",
    "polarization_check",
    "transmission",
    "group_velocity",
    "transparency_fwhm",
    "slow_light_summary",
    "calibrate",
]

_DEGENERATE_FLOOR = 1e-300


class DegenerateDenominatorError(ValueError):
    """(D - i*gc)(D - i*gb) - |Wc|^2 vanished: unphysical coincidence."""


class OpaqueCellError(RuntimeError):
    """|T(0)|^2 < 1/2: no transparency window to measure."""


class CalibrationError(RuntimeError):
    """No gamma_c in the search bracket reproduces the target width."""


@dataclass(frozen=True)
class MediumParams:
    """Atomic/cell parameters of the vapor cell.

    prefactor_K lumps N|mu|^2/(hbar eps0); density_N and dipole_mu are
    optional metadata.  If both are supplied they must reproduce
    prefactor_K to 1e-9 relative.
    """

    prefactor_K: float          # rad/s
    gamma_b: float              # rad/s
    gamma_c: float              # rad/s
    omega_c_rabi: float         # rad/s, |Wc|
    omega_ac: float             # rad/s
    cell_length_L: float        # m
    density_N: Optional[float] = None    # 1/m^3, informational
    dipole_mu: Optional[float] = None    # C m, informational
    constants: PhysicalConstants = field(default=CODATA)

    def __post_init__(self):
        if self.prefactor_K < 0:
            raise ValueError("prefactor_K must be >= 0")
        if self.gamma_b < 0:
            raise ValueError("gamma_b must be >= 0")
        if self.gamma_c <= 0:
            raise ValueError("gamma_c must be > 0")
        if not self.gamma_b < self.gamma_c:
            raise ValueError("gamma_b must be < gamma_c (metastable lower level)")
        if self.omega_c_rabi <= 0:
            raise ValueError("omega_c_rabi must be > 0")
        if self.omega_ac <= 0:
            raise ValueError("omega_ac must be > 0")
        if self.cell_length_L <= 0:
            raise ValueError("cell_length_L must be > 0")
        if self.density_N is not None and self.dipole_mu is not None:
            k = self.density_N * self.dipole_mu**2 / (
                self.constants.hbar * self.constants.epsilon0)
            if abs(k - self.prefactor_K) > 1e-9 * abs(self.prefactor_K):
                raise ValueError(
                    "density_N and dipole_mu inconsistent with prefactor_K "
                    f"(N mu^2/(hbar eps0) = {k!r}, prefactor_K = {self.prefactor_K!r})")

    def fingerprint(self) -> dict:
        return {
            "prefactor_K": self.prefactor_K,
            "gamma_b": self.gamma_b,
            "gamma_c": self.gamma_c,
            "omega_c_rabi": self.omega_c_rabi,
            "omega_ac": self.omega_ac,
            "cell_length_L": self.cell_length_L,
        }


@dataclass(frozen=True)
class Susceptibility:
    chi_real: float
    chi_imag: float

    def as_complex(self) -> complex:
        return complex(self.chi_real, self.chi_imag)


@dataclass(frozen=True)
class Transmission:
    magnitude: float
    phase: float

    def as_complex(self) -> complex:
        return self.magnitude * cmath.exp(1j * self.phase)


@dataclass(frozen=True)
class SlowLightSummary:
    v_g: float                  # m/s
    tau_d: float                # s
    delta_omega_tr: float       # rad/s, FWHM of |T|^2; +inf if the cell is lossless
    phi_d_prime_at_0: float     # s, slope of the transmission phase at nu = 0


@dataclass(frozen=True)
class PolarizationCheck:
    p_closed_form: complex      # C/m^2, from the analytic eigenvalue gradient
    p_finite_difference: complex  # C/m^2, from the 3x3 eigensolver gradient
    rel_discrepancy: float
    fd_second_order: bool       # step sweep h, h/2, h/4 behaved like O(h^2) (or hit the noise floor)


def hamiltonian(omega_p_rabi: complex, delta: float, medium: MediumParams) -> np.ndarray:
    """Interaction-picture Hamiltonian divided by hbar, basis {|a>,|c>,|b>}."""
    wp = complex(omega_p_rabi)
    wc = complex(medium.omega_c_rabi)
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = wp.conjugate()
    h[1, 0] = wp
    h[1, 1] = delta - 1j * medium.gamma_c
    h[1, 2] = wc.conjugate()
    h[2, 1] = wc
    h[2, 2] = delta - 1j * medium.gamma_b
    return h


def _denominator(delta: float, medium: MediumParams) -> complex:
    den = ((delta - 1j * medium.gamma_c) * (delta - 1j * medium.gamma_b)
           - medium.omega_c_rabi**2)
    if abs(den) < _DEGENERATE_FLOOR:
        raise DegenerateDenominatorError(
            f"(D-i gc)(D-i gb)-|Wc|^2 degenerate at delta={delta!r}")
    return den


def eigenvalue_zeta(omega_p_rabi: complex, delta: float, medium: MediumParams) -> complex:
    """Weak-probe eigenvalue of H/hbar, to leading order in |Wp|^2."""
    wp2 = abs(complex(omega_p_rabi))**2
    return -wp2 * (delta - 1j * medium.gamma_b) / _denominator(delta, medium)


def susceptibility(delta: float, medium: MediumParams) -> Susceptibility:
    """Linear susceptibility chi(D) = K (D-i gb)/((D-i gc)(D-i gb)-|Wc|^2)."""
    chi = medium.prefactor_K * (delta - 1j * medium.gamma_b) / _denominator(delta, medium)
    return Susceptibility(chi.real, chi.imag)


def _smallest_eigenvalue(h: np.ndarray) -> complex:
    ev = np.linalg.eigvals(h)
    return complex(ev[np.argmin(np.abs(ev))])


def polarization_check(omega_p_rabi: complex, delta: float, medium: MediumParams,
                       field_amplitude_E: float) -> PolarizationCheck:
    """Polarization two ways: closed form vs eigensolver finite difference.

    Closed form: P = eps0 chi E.  Numerical route: central difference of the
    smallest 3x3 eigenvalue with respect to the conjugate probe Rabi
    frequency (the (1,2) entry of H is varied independently of the (2,1)
    entry, which is the Wirtinger derivative Eq.-of-motion route), then
    P = -N mu* d(zeta)/d(Wp*).  N and mu are taken from the medium when
    present, otherwise an effective pair consistent with prefactor_K and
    (Wp, E) is derived; the product N|mu|^2 is all that matters.
    """
    if field_amplitude_E == 0:
        raise ValueError("field_amplitude_E must be nonzero")
    wp = complex(omega_p_rabi)
    hbar = medium.constants.hbar
    eps0 = medium.constants.epsilon0

    if medium.dipole_mu is not None:
        expected = medium.dipole_mu * field_amplitude_E / hbar
        if abs(wp - expected) > 1e-9 * max(abs(wp), abs(expected)):
            raise ValueError("omega_p_rabi inconsistent with mu*E/hbar")
    # the effective dipole carries the probe phase: mu = hbar Wp / E keeps
    # P = eps0 chi E exact for any phase convention of Wp
    mu = hbar * wp / field_amplitude_E
    n_eff = medium.density_N if (medium.density_N is not None
                                 and medium.dipole_mu is not None) else \
        medium.prefactor_K * hbar * eps0 / abs(mu) ** 2

    chi = susceptibility(delta, medium).as_complex()
    p_closed = eps0 * chi * field_amplitude_E

    def zeta_of_conj(w_conj: complex) -> complex:
        h = hamiltonian(wp, delta, medium)
        h[0, 1] = w_conj
        return _smallest_eigenvalue(h)

    w0 = wp.conjugate()
    h_step = 0.25 * medium.omega_c_rabi
    fds = []
    for h in (h_step, h_step / 2, h_step / 4):
        fds.append((zeta_of_conj(w0 + h) - zeta_of_conj(w0 - h)) / (2 * h))
    d1, d2, d3 = fds
    dzeta = d3
    # second-order behavior: successive differences shrink ~4x, or are
    # already at the eigensolver noise floor
    e12, e23 = abs(d1 - d2), abs(d2 - d3)
    floor = 1e-10 * max(abs(d3), 1e-300)
    second_order = (e23 <= floor) or (e12 / max(e23, 1e-300) > 2.5)

    p_fd = -n_eff * mu.conjugate() * dzeta
    scale = max(abs(p_closed), abs(p_fd), 1e-300)
    rel = abs(p_fd - p_closed) / scale
    return PolarizationCheck(p_closed, p_fd, rel, second_order)


def transmission(nu: float, W_s: float, medium: MediumParams) -> Transmission:
    """Transmission through the cell at probe frequency W_s + nu.

    T = exp(i chi(D) * omega_p L / (2c)) with D = omega_ac - (W_s + nu);
    the imaginary part of chi gives the amplitude decay e^{-chi'' w L/2c}
    and the real part the phase shift chi' w L / 2c.  The detuning is
    evaluated as (omega_ac - W_s) - nu so that a nu far below the optical
    carrier does not lose precision to the carrier's ulp.
    """
    omega_p = W_s + nu
    delta = (medium.omega_ac - W_s) - nu
    chi = susceptibility(delta, medium).as_complex()
    q = omega_p * medium.cell_length_L / (2 * medium.constants.c)
    t = cmath.exp(1j * q * chi)
    return Transmission(abs(t), q * chi.real)


def _dchi_real_domega(medium: MediumParams) -> float:
    """Analytic d(chi')/d(omega_probe) at resonance (D = 0).

    d(chi)/dD at 0 = K (gb^2 - |Wc|^2) / (gb gc + |Wc|^2)^2 and
    d/d(omega_probe) = -d/dD, so the slope is K(|Wc|^2-gb^2)/(gb gc+|Wc|^2)^2;
    for gb = 0 this is the familiar K/|Wc|^2.
    """
    gb, gc, wc2 = medium.gamma_b, medium.gamma_c, medium.omega_c_rabi**2
    return medium.prefactor_K * (wc2 - gb**2) / (gb * gc + wc2) ** 2


def group_velocity(medium: MediumParams, omega_p: float) -> float:
    """Resonant group velocity v_g = c / (1 + (omega_p/2) dchi'/domega)."""
    c = medium.constants.c
    return c / (1.0 + 0.5 * omega_p * _dchi_real_domega(medium))


def _power_transmission(nu: float, W_s: float, medium: MediumParams) -> float:
    t = transmission(nu, W_s, medium)
    return t.magnitude**2


def transparency_fwhm(medium: MediumParams, W_s: float) -> float:
    """FWHM of |T(nu)|^2 about nu = 0, by bisection on each side.

    Returns +inf when |T|^2 never drops below 1/2 (lossless or weakly
    absorbing cell).  Raises OpaqueCellError when |T(0)|^2 < 1/2.
    """
    t0 = _power_transmission(0.0, W_s, medium)
    if t0 < 0.5:
        raise OpaqueCellError(f"|T(0)|^2 = {t0:.6g} < 1/2: no transparency window")
    if medium.prefactor_K == 0:
        return math.inf

    def half_crossing(sign: float) -> float:
        # march a log grid out to well past the Autler-Townes doublet to
        # bracket the first |T|^2 = 1/2 crossing, then bisect; the doublet
        # itself is sampled explicitly since its width ~ sqrt(q K gamma_c)
        # can fall below any log-grid spacing
        wc = medium.omega_c_rabi
        samples = np.unique(np.concatenate([
            np.geomspace(wc * 1e-9, 8 * wc, 700),
            wc * np.array([1.0 - 1e-6, 1.0, 1.0 + 1e-6]),
        ]))
        lo = 0.0
        hi = None
        for x in samples:
            if _power_transmission(sign * x, W_s, medium) < 0.5:
                hi = x
                break
            lo = x
        if hi is None:
            return math.inf
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if _power_transmission(sign * mid, W_s, medium) < 0.5:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    up = half_crossing(+1.0)
    down = half_crossing(-1.0)
    if math.isinf(up) or math.isinf(down):
        return math.inf
    return up + down


def _phase_slope_at_zero(medium: MediumParams, W_s: float) -> float:
    """d(phi_d)/dnu at nu = 0 with phi_d(nu) = chi'(nu) W_s L/(2c).

    Richardson-extrapolated central difference; the step rides on the
    narrowest spectral scale so the cubic term stays below 1e-12 relative.
    """
    scale = min(medium.omega_c_rabi, medium.gamma_c * 10.0)
    h = 1e-4 * scale
    qs = W_s * medium.cell_length_L / (2 * medium.constants.c)

    def phi(nu: float) -> float:
        delta = (medium.omega_ac - W_s) - nu
        return susceptibility(delta, medium).chi_real * qs

    d = lambda step: (phi(step) - phi(-step)) / (2 * step)
    d1, d2 = d(h), d(h / 2)
    return (4 * d2 - d1) / 3


def slow_light_summary(medium: MediumParams, W_s: float) -> SlowLightSummary:
    """Group velocity, group delay, transparency width and phase slope.

    Requires the resonant configuration W_s = omega_ac so that the width is
    measured about the center of the window.
    """
    if abs(W_s - medium.omega_ac) > 1e-9 * medium.omega_ac:
        raise ValueError("slow_light_summary requires W_s = omega_ac")
    v_g = group_velocity(medium, W_s)
    L, c = medium.cell_length_L, medium.constants.c
    tau_d = L / v_g - L / c
    width = transparency_fwhm(medium, W_s)
    return SlowLightSummary(v_g, tau_d, width, _phase_slope_at_zero(medium, W_s))


def calibrate(v_g: float, delta_omega_tr: float, *, omega_c_rabi: float,
              omega_p: float, cell_length_L: float, gamma_b: float = 0.0,
              constants: PhysicalConstants = CODATA) -> MediumParams:
    """Build a MediumParams reproducing target v_g and transparency width.

    The group-velocity relation inverts in closed form,
    K = 2|Wc|^2 (c/v_g - 1)/omega_p; gamma_c is then the root of
    FWHM(|T|^2) = delta_omega_tr on the branch where the width shrinks as
    gamma_c grows.  The resonant carrier is used as omega_ac.
    """
    if v_g <= 0 or v_g > constants.c:
        raise ValueError("target v_g must lie in (0, c]")
    if delta_omega_tr <= 0:
        raise ValueError("target delta_omega_tr must be positive")
    k = 2.0 * omega_c_rabi**2 * (constants.c / v_g - 1.0) / omega_p
    if k == 0.0:
        # vacuum target: any gamma_c is consistent, the width is infinite
        return MediumParams(0.0, gamma_b, 1.0, omega_c_rabi, omega_p,
                            cell_length_L, constants=constants)

    def width_of(gc: float) -> float:
        m = MediumParams(k, gamma_b, gc, omega_c_rabi, omega_p,
                         cell_length_L, constants=constants)
        try:
            w = transparency_fwhm(m, omega_p)
        except OpaqueCellError:
            return -delta_omega_tr  # resonantly opaque: treat as zero width
        if math.isinf(w):
            return 1e30
        return w

    # the width decreases with gamma_c up to gamma_ridge = K q / ln 2 (where
    # the re-widening overdamped branch starts); root-find on that branch
    q = omega_p * cell_length_L / (2 * constants.c)
    gamma_ridge = k * q / math.log(2.0)
    lo, hi = 1e2, min(gamma_ridge, 1e12)
    f = lambda gc: width_of(gc) - delta_omega_tr
    if hi <= lo or f(lo) < 0 or f(hi) > 0:
        raise CalibrationError(
            f"no gamma_c in ({lo:g}, {hi:g}) rad/s gives width {delta_omega_tr:g}")
    gc = brentq(f, lo, hi, rtol=1e-14, maxiter=300)
    return MediumParams(k, gamma_b, gc, omega_c_rabi, omega_p, cell_length_L,
                        constants=constants)
