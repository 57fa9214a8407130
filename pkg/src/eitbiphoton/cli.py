"""Command-line front end.

Subcommands: susceptibility, singles, coincidence, baseline, summary,
preset.  Scans write CSV (default) or JSON with a `#` header block echoing
every resolved parameter as re-parseable `key = value` lines, so feeding an
output header back as a config reproduces the run.  Exit codes: 0 success,
2 configuration error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, parse_config
from .constants import RB87_D1_OMEGA
from .detection import ScanResult, scan, singles_spectrum
from .medium import (CalibrationError, MediumParams, OpaqueCellError,
                     slow_light_summary, susceptibility, transmission)
from .presets import get_preset, rb87_medium, default_spdc
from .quadrature import QuadratureError
from .spdc import SpdcParams

_OP_OF_COMMAND = {
    "singles": "singles_spectrum",
    "coincidence": "coincidence_rate",
    "baseline": "baseline_rate",
}


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key = value config file")
    p.add_argument("--out", type=Path, help="output file path")
    p.add_argument("--format", choices=("csv", "json"), help="output format")
    p.add_argument("--steps", type=int, help="number of grid points")
    p.add_argument("--min", dest="scan_min", type=float, help="grid start")
    p.add_argument("--max", dest="scan_max", type=float, help="grid end")
    p.add_argument("--tol", type=float, help="relative quadrature tolerance")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eitbiphoton",
        description="Two-photon interference with an EIT vapor cell: "
                    "spectra, counting-rate scans and slow-light summaries.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("susceptibility", "scan chi(nu) and |T|^2 over a nu grid"),
            ("singles", "singles spectrum S(nu) over a nu grid"),
            ("coincidence", "coincidence rate over a delay grid"),
            ("baseline", "medium-free coincidence rate over a delay grid"),
            ("summary", "print the slow-light summary as JSON"),
            ("preset", "run a stored figure preset")):
        sp = sub.add_parser(name, help=help_text)
        _common_flags(sp)
        if name == "preset":
            sp.add_argument("name", choices=("fig3a", "fig3b", "fig5a",
                                             "fig5b", "fig6"))
    return p


def _load_config(args) -> RunConfig:
    if args.config is not None:
        return parse_config(args.config.read_text())
    # documented default: the calibrated Rb87 cell and caption source
    return parse_config("target_v_g = 1.064e7\ntarget_delta_omega_tr = 5.527e9\n")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.steps is not None:
        if args.steps < 2:
            raise ConfigError("steps must be >= 2")
        cfg.steps = args.steps
    if args.scan_min is not None:
        cfg.scan_min = args.scan_min
    if args.scan_max is not None:
        cfg.scan_max = args.scan_max
    if not cfg.scan_min < cfg.scan_max:
        raise ConfigError("scan bounds must satisfy min < max")
    if args.tol is not None:
        if args.tol <= 0:
            raise ConfigError("tol must be positive")
        cfg.rel_tol = args.tol
    if args.format is not None:
        cfg.output_format = args.format
    if args.out is not None:
        cfg.output_path = str(args.out)
    return cfg


def _config_echo_lines(cfg: RunConfig, op: str) -> list[str]:
    """Resolved parameters as re-parseable config lines (round-trip)."""
    lines = []
    if cfg.medium is None:
        lines.append("medium = none")
    else:
        m = cfg.medium
        lines += [f"prefactor_K = {m.prefactor_K!r}",
                  f"gamma_b = {m.gamma_b!r}",
                  f"gamma_c = {m.gamma_c!r}",
                  f"omega_c_rabi = {m.omega_c_rabi!r}",
                  f"omega_ac = {m.omega_ac!r}",
                  f"cell_length_L = {m.cell_length_L!r}"]
    lines += [f"Dl = {cfg.spdc.Dl!r}",
              f"W_s = {cfg.spdc.W_s!r}",
              f"W_i = {cfg.spdc.W_i!r}",
              f"abscissa = {'nu' if op in ('singles_spectrum', 'susceptibility') else 'delta_tau'}",
              f"scan_min = {cfg.scan_min!r}",
              f"scan_max = {cfg.scan_max!r}",
              f"steps = {cfg.steps}",
              f"normalization = {cfg.normalization}",
              f"rel_tol = {cfg.rel_tol!r}"]
    if cfg.input_filter is not None:
        lines.append(f"filter_half_width = {cfg.input_filter.half_width!r}")
    return lines


def _write_scan(cfg: RunConfig, result: ScanResult, op: str,
                columns: Sequence[str], rows: Sequence[Sequence[float]],
                preset_name: Optional[str] = None) -> None:
    out = cfg.output_path or "scan.csv"
    if cfg.output_format == "json":
        payload = {
            "tool": f"eitbiphoton {__version__}",
            "op": op,
            "preset": preset_name,
            "config": _config_echo_lines(cfg, op),
            "params": result.params_fingerprint if result else None,
            "columns": list(columns),
            "points": [list(r) for r in rows],
        }
        Path(out).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
        return
    head = [f"# eitbiphoton {__version__}",
            f"# op = {op}"]
    if preset_name:
        head.append(f"# preset = {preset_name}")
    head += [f"# config: {line}" for line in _config_echo_lines(cfg, op)]
    if result is not None:
        head.append(f"# normalization_divisor = "
                    f"{result.params_fingerprint.get('normalization_divisor', 1.0)!r}")
    head.append("# columns = " + ", ".join(columns))
    body = [",".join(f"{v:.8e}" for v in row) for row in rows]
    Path(out).write_text("\n".join(head + body) + "\n")


def _grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.scan_min, cfg.scan_max, cfg.steps)


def _run_scan_command(op: str, cfg: RunConfig,
                      preset_name: Optional[str] = None) -> int:
    if op == "susceptibility":
        if cfg.medium is None:
            raise ConfigError("susceptibility scan needs a medium")
        grid = _grid(cfg)
        rows = []
        for nu in grid:
            chi = susceptibility((cfg.medium.omega_ac - cfg.spdc.W_s) - nu,
                                 cfg.medium)
            t = transmission(nu, cfg.spdc.W_s, cfg.medium)
            rows.append((nu, chi.chi_real, chi.chi_imag, t.magnitude**2))
        _write_scan(cfg, None, op,
                    ("nu", "chi_real", "chi_imag", "power_transmission"),
                    rows, preset_name)
        return 0
    grid = _grid(cfg)
    result = scan(op, grid, cfg.medium, cfg.spdc, tol=cfg.rel_tol,
                  normalization=cfg.normalization, workers=cfg.workers,
                  input_filter=cfg.input_filter)
    rows = list(result.points)
    _write_scan(cfg, result, op, (result.abscissa_name, "rate"), rows,
                preset_name)
    return 0


def _run_summary(cfg: RunConfig) -> int:
    if cfg.medium is None:
        raise ConfigError("summary needs a medium")
    s = slow_light_summary(cfg.medium, cfg.medium.omega_ac)
    payload = {
        "v_g": s.v_g,
        "tau_d": s.tau_d,
        "delta_omega_tr": s.delta_omega_tr if math.isfinite(s.delta_omega_tr) else None,
        "phi_d_prime_at_0": s.phi_d_prime_at_0,
        "medium": cfg.medium.fingerprint(),
    }
    text = json.dumps(payload, sort_keys=True, indent=1)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text + "\n")
    else:
        print(text)
    return 0


def _run_preset(args) -> int:
    preset = get_preset(args.name)
    spdc = default_spdc()
    medium = preset.medium()
    cfg = RunConfig(
        medium=medium, spdc=spdc, input_filter=preset.input_filter(),
        abscissa="nu" if preset.op == "singles_spectrum"
        else "delta_tau", scan_min=preset.grid_min, scan_max=preset.grid_max,
        steps=preset.steps, normalization=preset.normalization,
        rel_tol=1e-7, abs_tol=0.0, max_subdivisions=10**6, workers=None,
        output_path=str(args.out) if args.out else f"{args.name}.csv",
        output_format=args.format or "csv")
    cfg = _apply_overrides(cfg, args)
    return _run_scan_command(preset.op, cfg, preset_name=args.name)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "preset":
            return _run_preset(args)
        cfg = _apply_overrides(_load_config(args), args)
        if args.command == "summary":
            return _run_summary(cfg)
        if args.command == "susceptibility":
            if args.scan_min is None and "scan_min" not in cfg.raw:
                cfg.scan_min, cfg.scan_max = -4e10, 4e10
            return _run_scan_command("susceptibility", cfg)
        if args.command == "singles" and args.scan_min is None \
                and "scan_min" not in cfg.raw:
            cfg.scan_min, cfg.scan_max = -4e10, 4e10
        return _run_scan_command(_OP_OF_COMMAND[args.command], cfg)
    except (ConfigError, CalibrationError, OpaqueCellError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
