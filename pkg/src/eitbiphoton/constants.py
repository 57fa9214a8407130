"""Physical constants and default carrier frequency.

Everything in this package is expressed in SI with angular frequencies in
rad/s.  Quantities quoted in "Hz" by vapor-cell data sheets are accepted only
after conversion by the caller; the library itself never multiplies by 2*pi.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values used throughout. Immutable."""

    hbar: float = 1.054571817e-34      # J s
    epsilon0: float = 8.8541878128e-12  # F/m
    c: float = 2.99792458e8             # m/s

    def __post_init__(self):
        if self.hbar <= 0 or self.epsilon0 <= 0 or self.c <= 0:
            raise ValueError("physical constants must be strictly positive")


CODATA = PhysicalConstants()

# Rb87 D1 probe carrier (795 nm), rad/s.  Enters only through omega*L/c
# prefactors, so the rounded literature value is used everywhere.
RB87_D1_OMEGA = 2.369e15
