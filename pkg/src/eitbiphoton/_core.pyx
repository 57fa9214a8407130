# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled evaluation kernels (hot inner loops of the rate integrals).

Function-for-function twin of `_core_py`; see that module for the parameter
conventions.  Scalar math is done in C99 double complex so each integrand
sample costs a couple of cexp calls and no Python objects.
"""

import numpy as np

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double cabs(double complex)
    double complex conj(double complex)
    double creal(double complex)
    double cimag(double complex)

from libc.math cimport sin, cos, fabs

BACKEND = "compiled"

cdef double _TAYLOR_CUT = 1e-4


cdef inline double _sinc2(double u) nogil:
    cdef double s
    if fabs(u) < 1e-8:
        return 1.0 - u * u / 3.0
    s = sin(u) / u
    return s * s


cdef inline double complex _phi(double x) nogil:
    cdef double complex ix
    cdef double h
    if fabs(x) < _TAYLOR_CUT:
        ix = 1j * x
        return 1.0 + ix / 2.0 + ix * ix / 6.0 + ix * ix * ix / 24.0 \
            + ix * ix * ix * ix / 120.0
    h = 0.5 * x
    # cancellation-free form of (e^{ix}-1)/(ix)
    return cexp(1j * h) * (sin(h) / h)


cdef inline double complex _chi(double delta, double K, double gb,
                                double gc, double oc2) nogil:
    return K * (delta - 1j * gb) / ((delta - 1j * gc) * (delta - 1j * gb) - oc2)


cdef inline double complex _trans(double x, double w_s, double omega_ac,
                                  double l_2c, double K, double gb,
                                  double gc, double oc2) nogil:
    cdef double complex chi = _chi(omega_ac - w_s - x, K, gb, gc, oc2)
    return cexp(1j * (w_s + x) * l_2c * chi)


def phi_array(x):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(xv.shape[0], dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        ov[i] = _phi(xv[i])
    return out


def sinc2_array(u):
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    out = np.empty(uv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(uv.shape[0]):
        ov[i] = _sinc2(uv[i])
    return out


def chi_array(delta, double K, double gb, double gc, double oc2):
    cdef double[::1] dv = np.ascontiguousarray(delta, dtype=np.float64)
    out = np.empty(dv.shape[0], dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i
    for i in range(dv.shape[0]):
        ov[i] = _chi(dv[i], K, gb, gc, oc2)
    return out


def transmission_array(nu, double w_s, double omega_ac, double l_2c,
                       double K, double gb, double gc, double oc2):
    cdef double[::1] nv = np.ascontiguousarray(nu, dtype=np.float64)
    out = np.empty(nv.shape[0], dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i
    for i in range(nv.shape[0]):
        ov[i] = _trans(nv[i], w_s, omega_ac, l_2c, K, gb, gc, oc2)
    return out


def singles_integrand(nu, double half_dl, double w_s, double omega_ac,
                      double l_2c, double K, double gb, double gc, double oc2):
    cdef double[::1] nv = np.ascontiguousarray(nu, dtype=np.float64)
    out = np.empty(nv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double complex t
    for i in range(nv.shape[0]):
        t = _trans(nv[i], w_s, omega_ac, l_2c, K, gb, gc, oc2)
        ov[i] = _sinc2(nv[i] * half_dl) * (creal(t) * creal(t) + cimag(t) * cimag(t))
    return out


def baseline_integrand(nu, double half_dl, double bdelay):
    cdef double[::1] nv = np.ascontiguousarray(nu, dtype=np.float64)
    out = np.empty(nv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(nv.shape[0]):
        ov[i] = _sinc2(nv[i] * half_dl) * (1.0 - cos(nv[i] * bdelay))
    return out


def coincidence_direct_integrand(nu, double dl, double dw, double dtau,
                                 double w_s, double omega_ac, double l_2c,
                                 double K, double gb, double gc, double oc2):
    cdef double[::1] nv = np.ascontiguousarray(nu, dtype=np.float64)
    out = np.empty(nv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double complex t1, t2, p1, p2, cross
    cdef double n
    for i in range(nv.shape[0]):
        n = nv[i]
        t1 = _trans(n, w_s, omega_ac, l_2c, K, gb, gc, oc2)
        t2 = _trans(dw - n, w_s, omega_ac, l_2c, K, gb, gc, oc2)
        p1 = _phi(n * dl)
        p2 = _phi((dw - n) * dl)
        cross = conj(p1) * p2 * conj(t1) * t2 * cexp(1j * (2.0 * n - dw) * dtau)
        ov[i] = (creal(p1) * creal(p1) + cimag(p1) * cimag(p1)) \
            * (creal(t1) * creal(t1) + cimag(t1) * cimag(t1)) - creal(cross)
    return out


def correction_amplitude(nu, double dl, double dw, double w_s, double omega_ac,
                         double l_2c, double K, double gb, double gc, double oc2):
    cdef double[::1] nv = np.ascontiguousarray(nu, dtype=np.float64)
    out = np.empty(nv.shape[0], dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i
    cdef double complex t1, t2
    cdef double n
    for i in range(nv.shape[0]):
        n = nv[i]
        t1 = _trans(n, w_s, omega_ac, l_2c, K, gb, gc, oc2)
        t2 = _trans(dw - n, w_s, omega_ac, l_2c, K, gb, gc, oc2)
        ov[i] = conj(_phi(n * dl)) * _phi((dw - n) * dl) * (conj(t1) * t2 - 1.0)
    return out


def biphoton_correction(nu, double dl, double w_s, double omega_ac,
                        double l_2c, double K, double gb, double gc, double oc2):
    cdef double[::1] nv = np.ascontiguousarray(nu, dtype=np.float64)
    out = np.empty(nv.shape[0], dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i
    for i in range(nv.shape[0]):
        ov[i] = _phi(nv[i] * dl) * (_trans(nv[i], w_s, omega_ac, l_2c,
                                           K, gb, gc, oc2) - 1.0)
    return out
