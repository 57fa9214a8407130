"""Pure-numpy evaluation kernels (fallback backend).

Mirrors the compiled extension `_core` function-for-function; the wrapper in
`kernels.py` picks whichever imports.  All functions take contiguous float64
arrays plus scalar parameters and return freshly allocated arrays.

Conventions: nu is the offset from the signal carrier W_s; the probe
detuning is D = omega_ac - (W_s + nu); T(x) is the cell transmission at
probe frequency W_s + x; dl is the SPDC product D*l, dw = W_i - W_s.
"""

import numpy as np

BACKEND = "python"

_TAYLOR_CUT = 1e-4


def _sinc(u):
    return np.sinc(u / np.pi)


def _phi(x):
    out = np.empty(np.shape(x), dtype=complex)
    small = np.abs(x) < _TAYLOR_CUT
    ix = 1j * x[small]
    out[small] = 1.0 + ix / 2.0 + ix**2 / 6.0 + ix**3 / 24.0 + ix**4 / 120.0
    xb = x[~small]
    out[~small] = np.exp(1j * xb / 2.0) * np.sinc(xb / (2.0 * np.pi))
    return out


def _chi(delta, K, gb, gc, oc2):
    return K * (delta - 1j * gb) / ((delta - 1j * gc) * (delta - 1j * gb) - oc2)


def _trans(x, w_s, omega_ac, l_2c, K, gb, gc, oc2):
    chi = _chi(omega_ac - w_s - x, K, gb, gc, oc2)
    return np.exp(1j * (w_s + x) * l_2c * chi)


def phi_array(x):
    return _phi(np.asarray(x, dtype=float))


def sinc2_array(u):
    return _sinc(np.asarray(u, dtype=float)) ** 2


def chi_array(delta, K, gb, gc, oc2):
    return _chi(np.asarray(delta, dtype=float), K, gb, gc, oc2)


def transmission_array(nu, w_s, omega_ac, l_2c, K, gb, gc, oc2):
    return _trans(np.asarray(nu, dtype=float), w_s, omega_ac, l_2c, K, gb, gc, oc2)


def singles_integrand(nu, half_dl, w_s, omega_ac, l_2c, K, gb, gc, oc2):
    nu = np.asarray(nu, dtype=float)
    t = _trans(nu, w_s, omega_ac, l_2c, K, gb, gc, oc2)
    return _sinc(nu * half_dl) ** 2 * (t.real**2 + t.imag**2)


def baseline_integrand(nu, half_dl, bdelay):
    nu = np.asarray(nu, dtype=float)
    return _sinc(nu * half_dl) ** 2 * (1.0 - np.cos(nu * bdelay))


def coincidence_direct_integrand(nu, dl, dw, dtau, w_s, omega_ac, l_2c,
                                 K, gb, gc, oc2):
    """Integrand of the general coincidence rate (direct route).

    |Phi(nu Dl) T(nu)|^2 - Re[Phi*(nu Dl) Phi((dw-nu) Dl) T*(nu) T(dw-nu)
                              e^{+i(2 nu - dw) dtau}]
    """
    nu = np.asarray(nu, dtype=float)
    t1 = _trans(nu, w_s, omega_ac, l_2c, K, gb, gc, oc2)
    t2 = _trans(dw - nu, w_s, omega_ac, l_2c, K, gb, gc, oc2)
    p1 = _phi(nu * dl)
    p2 = _phi((dw - nu) * dl)
    cross = np.conj(p1) * p2 * np.conj(t1) * t2 * np.exp(1j * (2.0 * nu - dw) * dtau)
    return np.abs(p1) ** 2 * (t1.real**2 + t1.imag**2) - cross.real


def correction_amplitude(nu, dl, dw, w_s, omega_ac, l_2c, K, gb, gc, oc2):
    """G(nu) = Phi*(nu Dl) Phi((dw-nu) Dl) [T*(nu) T(dw-nu) - 1]."""
    nu = np.asarray(nu, dtype=float)
    t1 = _trans(nu, w_s, omega_ac, l_2c, K, gb, gc, oc2)
    t2 = _trans(dw - nu, w_s, omega_ac, l_2c, K, gb, gc, oc2)
    return np.conj(_phi(nu * dl)) * _phi((dw - nu) * dl) * (np.conj(t1) * t2 - 1.0)


def biphoton_correction(nu, dl, w_s, omega_ac, l_2c, K, gb, gc, oc2):
    """Phi(nu Dl) (T(nu) - 1), the medium part of the two-photon envelope."""
    nu = np.asarray(nu, dtype=float)
    t = _trans(nu, w_s, omega_ac, l_2c, K, gb, gc, oc2)
    return _phi(nu * dl) * (t - 1.0)
