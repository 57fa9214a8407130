"""Backend selection for the evaluation kernels.

The compiled extension is preferred; the numpy implementation is the
drop-in fallback.  `BACKEND` reports which one is live.  The convenience
wrappers below unpack the parameter dataclasses so callers never thread
eight scalars by hand.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised implicitly by whichever env runs
    from . import _core as _impl
except ImportError:  # pragma: no cover
    from . import _core_py as _impl

from . import _core_py

BACKEND = _impl.BACKEND

phi_array = _impl.phi_array
sinc2_array = _impl.sinc2_array


def _medium_scalars(medium):
    return (medium.omega_ac,
            medium.cell_length_L / (2.0 * medium.constants.c),
            medium.prefactor_K, medium.gamma_b, medium.gamma_c,
            medium.omega_c_rabi**2)


def chi_array(delta, medium):
    delta = np.ascontiguousarray(delta, dtype=float)
    return _impl.chi_array(delta, medium.prefactor_K, medium.gamma_b,
                           medium.gamma_c, medium.omega_c_rabi**2)


def transmission_array(nu, w_s, medium):
    nu = np.ascontiguousarray(nu, dtype=float)
    om, l2c, k, gb, gc, oc2 = _medium_scalars(medium)
    return _impl.transmission_array(nu, w_s, om, l2c, k, gb, gc, oc2)


def singles_integrand(nu, medium, spdc):
    nu = np.ascontiguousarray(nu, dtype=float)
    om, l2c, k, gb, gc, oc2 = _medium_scalars(medium)
    return _impl.singles_integrand(nu, spdc.Dl / 2.0, spdc.W_s, om, l2c,
                                   k, gb, gc, oc2)


def baseline_integrand(nu, spdc, delta_tau):
    nu = np.ascontiguousarray(nu, dtype=float)
    return _impl.baseline_integrand(nu, spdc.Dl / 2.0, spdc.Dl - 2.0 * delta_tau)


def coincidence_direct_integrand(nu, medium, spdc, delta_tau):
    nu = np.ascontiguousarray(nu, dtype=float)
    om, l2c, k, gb, gc, oc2 = _medium_scalars(medium)
    return _impl.coincidence_direct_integrand(
        nu, spdc.Dl, spdc.W_i - spdc.W_s, delta_tau, spdc.W_s, om, l2c,
        k, gb, gc, oc2)


def correction_amplitude(nu, medium, spdc):
    nu = np.ascontiguousarray(nu, dtype=float)
    om, l2c, k, gb, gc, oc2 = _medium_scalars(medium)
    return _impl.correction_amplitude(nu, spdc.Dl, spdc.W_i - spdc.W_s,
                                      spdc.W_s, om, l2c, k, gb, gc, oc2)


def biphoton_correction(nu, medium, spdc):
    nu = np.ascontiguousarray(nu, dtype=float)
    om, l2c, k, gb, gc, oc2 = _medium_scalars(medium)
    return _impl.biphoton_correction(nu, spdc.Dl, spdc.W_s, om, l2c,
                                     k, gb, gc, oc2)
