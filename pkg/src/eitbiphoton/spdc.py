"""Collinear degenerate type-II SPDC source: phase matching and spectrum.

The longitudinal phase-matching function is

    Phi(x) = (e^{ix} - 1)/(ix),   Phi(0) = 1,

whose squared magnitude is the unfiltered spectral density
S0(nu) = sinc^2(nu Dl / 2).  Only the product Dl (inverse group-velocity
difference times crystal length) enters anywhere downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = ["SpdcParams", "phase_matching", "unfiltered_spectrum"]

_TAYLOR_CUT = 1e-4


@dataclass(frozen=True)
class SpdcParams:
    """Biphoton source parameters.  Frequencies in rad/s, Dl in seconds."""

    Dl: float                  # s, product D*l
    W_s: float                 # rad/s, signal central frequency
    W_i: float                 # rad/s, idler central frequency
    omega_pump: float          # rad/s
    D: Optional[float] = None  # s/m, inverse group-velocity difference
    l: Optional[float] = None  # m, crystal length

    def __post_init__(self):
        if self.Dl <= 0:
            raise ValueError("Dl must be > 0")
        if self.W_s + self.W_i != self.omega_pump:
            raise ValueError("W_s + W_i must equal omega_pump exactly "
                             "(frequency phase matching)")
        if self.D is not None and self.l is not None:
            if abs(self.D * self.l - self.Dl) > 1e-12 * self.Dl:
                raise ValueError("D*l inconsistent with Dl")

    @classmethod
    def degenerate(cls, Dl: float, omega_pump: float, **kw) -> "SpdcParams":
        half = omega_pump / 2.0
        return cls(Dl=Dl, W_s=half, W_i=half, omega_pump=omega_pump, **kw)

    @property
    def is_degenerate(self) -> bool:
        return self.W_s == self.W_i

    def fingerprint(self) -> dict:
        return {"Dl": self.Dl, "W_s": self.W_s, "W_i": self.W_i,
                "omega_pump": self.omega_pump}


def phase_matching(x):
    """Phi(x) = (e^{ix} - 1)/(ix) with a Taylor branch near the origin.

    Accepts scalars or arrays.  For |x| < 1e-4 the 4-term series
    1 + ix/2 + (ix)^2/6 + (ix)^3/24 + (ix)^4/120 is used; the crossover is
    continuous to ~1e-14.
    """
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    out = np.empty(x_arr.shape, dtype=complex)
    small = np.abs(x_arr) < _TAYLOR_CUT
    ix = 1j * x_arr[small]
    out[small] = 1.0 + ix / 2.0 + ix**2 / 6.0 + ix**3 / 24.0 + ix**4 / 120.0
    xb = x_arr[~small]
    # cancellation-free form of (e^{ix}-1)/(ix)
    out[~small] = np.exp(1j * xb / 2.0) * np.sinc(xb / (2.0 * np.pi))
    return complex(out[0]) if scalar else out


def _sinc(u):
    return np.sinc(np.asarray(u) / np.pi)


def unfiltered_spectrum(nu, params: SpdcParams):
    """S0(nu) = sinc^2(nu Dl / 2); scalar in, scalar out (arrays pass through)."""
    s = _sinc(np.asarray(nu, dtype=float) * params.Dl / 2.0) ** 2
    return float(s) if np.ndim(nu) == 0 else s
