"""Flat key = value run configuration.

Lines are `key = value` with `#` comments; unknown keys are hard errors so
typos never silently fall back to defaults.  All frequencies are rad/s.
Exactly one of prefactor_K or the calibration-target pair
(target_v_g, target_delta_omega_tr) must pin the medium; `medium = none`
turns the cell off entirely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .constants import RB87_D1_OMEGA
from .detection import InputFilter
from .medium import MediumParams, calibrate
from .presets import CELL_LENGTH, DL_PRODUCT, OMEGA_C_RABI
from .spdc import SpdcParams

__all__ = ["RunConfig", "ConfigError", "parse_config"]


class ConfigError(ValueError):
    """Invalid configuration; message names the offending line/key."""


_FLOAT_KEYS = {
    "prefactor_K", "target_v_g", "target_delta_omega_tr",
    "gamma_b", "gamma_c", "omega_c_rabi", "omega_ac", "cell_length_L",
    "Dl", "W_s", "W_i", "signal_detuning", "filter_half_width",
    "scan_min", "scan_max", "rel_tol", "abs_tol",
}
_INT_KEYS = {"steps", "max_subdivisions", "workers"}
_STR_KEYS = {"medium", "abscissa", "normalization", "output_path", "output_format"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


@dataclass
class RunConfig:
    medium: Optional[MediumParams]
    spdc: SpdcParams
    input_filter: Optional[InputFilter]
    abscissa: str               # "delta_tau" | "nu"
    scan_min: float
    scan_max: float
    steps: int
    normalization: str
    rel_tol: float
    abs_tol: float
    max_subdivisions: int
    workers: Optional[int]
    output_path: Optional[str]
    output_format: str
    raw: dict = field(default_factory=dict)

    def fingerprint(self) -> dict:
        return {
            "medium": self.medium.fingerprint() if self.medium else None,
            "spdc": self.spdc.fingerprint(),
            "filter_half_width": self.input_filter.half_width
            if self.input_filter else None,
            "abscissa": self.abscissa,
            "scan_min": self.scan_min,
            "scan_max": self.scan_max,
            "steps": self.steps,
            "normalization": self.normalization,
            "rel_tol": self.rel_tol,
        }


def _parse_lines(text: str) -> dict:
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {n}: expected 'key = value', got {line!r}")
        key, _, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        try:
            if key in _FLOAT_KEYS:
                out[key] = float(value)
            elif key in _INT_KEYS:
                out[key] = int(value)
            else:
                out[key] = value
        except ValueError:
            raise ConfigError(f"line {n}: bad value for {key!r}: {value!r}") from None
    return out


def parse_config(text: str) -> RunConfig:
    kv = _parse_lines(text)

    w_s = kv.get("W_s", RB87_D1_OMEGA)
    w_i = kv.get("W_i", w_s)
    spdc = SpdcParams(Dl=kv.get("Dl", DL_PRODUCT), W_s=w_s, W_i=w_i,
                      omega_pump=w_s + w_i)

    medium = _build_medium(kv, w_s)

    abscissa = kv.get("abscissa", "delta_tau")
    if abscissa not in ("delta_tau", "nu"):
        raise ConfigError(f"abscissa must be delta_tau or nu, got {abscissa!r}")
    norm = kv.get("normalization", "raw")
    if norm not in ("raw", "plateau=1", "peak=1"):
        raise ConfigError(f"normalization must be raw, plateau=1 or peak=1, got {norm!r}")
    steps = kv.get("steps", 201)
    if steps < 2:
        raise ConfigError("steps must be >= 2")
    scan_min = kv.get("scan_min", -spdc.Dl if abscissa == "delta_tau" else -4e12)
    scan_max = kv.get("scan_max", 2 * spdc.Dl if abscissa == "delta_tau" else 4e12)
    if not scan_min < scan_max:
        raise ConfigError("scan_min must be < scan_max")
    rel_tol = kv.get("rel_tol", 1e-7)
    abs_tol = kv.get("abs_tol", 0.0)
    if rel_tol <= 0 or abs_tol < 0:
        raise ConfigError("tolerances must be positive (abs_tol may be 0 for auto)")
    fmt = kv.get("output_format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output_format must be csv or json, got {fmt!r}")

    fhw = kv.get("filter_half_width", 0.0)
    if fhw < 0:
        raise ConfigError("filter_half_width must be >= 0")
    input_filter = InputFilter(fhw) if fhw > 0 else None

    return RunConfig(
        medium=medium, spdc=spdc, input_filter=input_filter, abscissa=abscissa,
        scan_min=scan_min, scan_max=scan_max, steps=steps,
        normalization=norm, rel_tol=rel_tol, abs_tol=abs_tol,
        max_subdivisions=kv.get("max_subdivisions", 10**6),
        workers=kv.get("workers"), output_path=kv.get("output_path"),
        output_format=fmt, raw=kv,
    )


def _build_medium(kv: dict, w_s: float) -> Optional[MediumParams]:
    if kv.get("medium") == "none":
        for key in ("prefactor_K", "target_v_g", "target_delta_omega_tr"):
            if key in kv:
                raise ConfigError(f"medium=none conflicts with {key!r}")
        return None
    has_k = "prefactor_K" in kv
    has_targets = "target_v_g" in kv or "target_delta_omega_tr" in kv
    if has_k and has_targets:
        raise ConfigError("give either prefactor_K or calibration targets, not both")
    if has_targets and not ("target_v_g" in kv and "target_delta_omega_tr" in kv):
        raise ConfigError("calibration needs both target_v_g and target_delta_omega_tr")
    if not has_k and not has_targets:
        raise ConfigError("medium underdetermined: give prefactor_K, calibration "
                          "targets, or medium = none")

    omega_c = kv.get("omega_c_rabi", OMEGA_C_RABI)
    length = kv.get("cell_length_L", CELL_LENGTH)
    gamma_b = kv.get("gamma_b", 0.0)
    omega_ac = kv.get("omega_ac", w_s - kv.get("signal_detuning", 0.0))
    try:
        if has_k:
            if "gamma_c" not in kv:
                raise ConfigError("prefactor_K route requires gamma_c")
            return MediumParams(kv["prefactor_K"], gamma_b, kv["gamma_c"],
                                omega_c, omega_ac, length)
        m = calibrate(kv["target_v_g"], kv["target_delta_omega_tr"],
                      omega_c_rabi=omega_c, omega_p=w_s,
                      cell_length_L=length, gamma_b=gamma_b)
        if omega_ac != w_s:
            m = MediumParams(m.prefactor_K, m.gamma_b, m.gamma_c,
                             m.omega_c_rabi, omega_ac, m.cell_length_L)
        return m
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid medium parameters: {exc}") from exc
