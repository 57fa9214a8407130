"""Two-photon interference with an EIT vapor cell in the signal arm.

Modules:
  medium      three-level Lambda system: chi, transmission, slow light
  spdc        collinear degenerate type-II biphoton source
  quadrature  adaptive two-scale Gauss-Kronrod engine with analytic tails
  oscillatory Filon transforms for the delay-scan phases
  detection   singles/coincidence rates, scans and dip metrics
  presets     calibrated Rb87 figure presets
  cli         command-line front end
"""

__version__ = "0.1.0"

from .constants import CODATA, RB87_D1_OMEGA, PhysicalConstants
from .kernels import BACKEND
from .medium import (CalibrationError, DegenerateDenominatorError, MediumParams,
                     OpaqueCellError, SlowLightSummary, Susceptibility,
                     Transmission, calibrate, eigenvalue_zeta, group_velocity,
                     hamiltonian, polarization_check, slow_light_summary,
                     susceptibility, transmission, transparency_fwhm)
from .spdc import SpdcParams, phase_matching, unfiltered_spectrum
from .quadrature import (QuadratureError, QuadratureReport, SincSquaredTail,
                         infinite_domain_wrap, integrate)
from .detection import (DipMetrics, InputFilter, ScanResult, baseline_rate,
                        biphoton_amplitude, coincidence_rate,
                        coincidence_rate_direct, dip_metrics,
                        oscillation_segment_agreement, scan, singles_rate,
                        singles_spectrum)

__all__ = [
    "__version__", "BACKEND",
    "CODATA", "RB87_D1_OMEGA", "PhysicalConstants",
    "MediumParams", "Susceptibility", "Transmission", "SlowLightSummary",
    "DegenerateDenominatorError", "OpaqueCellError", "CalibrationError",
    "hamiltonian", "eigenvalue_zeta", "susceptibility", "polarization_check",
    "transmission", "group_velocity", "transparency_fwhm",
    "slow_light_summary", "calibrate",
    "SpdcParams", "phase_matching", "unfiltered_spectrum",
    "QuadratureReport", "QuadratureError", "SincSquaredTail",
    "integrate", "infinite_domain_wrap",
    "ScanResult", "DipMetrics", "InputFilter", "singles_spectrum", "singles_rate",
    "biphoton_amplitude", "coincidence_rate", "coincidence_rate_direct",
    "baseline_rate", "scan", "dip_metrics", "oscillation_segment_agreement",
]
