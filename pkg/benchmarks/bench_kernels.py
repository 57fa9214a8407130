#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

The kernels are the inner loop of every brute-force rate integral (the
validation route and the adaptive reference passes), so this is where the
extension pays off.  Run after an editable install:

    python benchmarks/bench_kernels.py [--n 200000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from eitbiphoton import _core_py
from eitbiphoton.presets import default_spdc, rb87_medium

try:
    from eitbiphoton import _core
except ImportError:
    _core = None


def time_call(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    medium = rb87_medium()
    spdc = default_spdc()
    nu = np.linspace(-2e13, 2e13, args.n)
    scal = (spdc.W_s, medium.omega_ac,
            medium.cell_length_L / (2 * medium.constants.c),
            medium.prefactor_K, medium.gamma_b, medium.gamma_c,
            medium.omega_c_rabi**2)

    cases = [
        ("chi_array", (nu, *scal[3:])),
        ("transmission_array", (nu, *scal)),
        ("singles_integrand", (nu, spdc.Dl / 2, *scal)),
        ("baseline_integrand", (nu, spdc.Dl / 2, spdc.Dl - 2 * 1.5e-9)),
        ("coincidence_direct_integrand",
         (nu, spdc.Dl, 0.0, 1.5e-9, *scal)),
        ("correction_amplitude", (nu, spdc.Dl, 0.0, *scal)),
        ("biphoton_correction", (nu, spdc.Dl, *scal)),
        ("phi_array", (nu * spdc.Dl,)),
    ]

    if _core is None:
        print("compiled extension not available; timing fallback only")
    header = f"{'kernel':32s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, call_args in cases:
        t_py = time_call(getattr(_core_py, name), call_args, args.repeats)
        if _core is not None:
            t_c = time_call(getattr(_core, name), call_args, args.repeats)
            a = np.asarray(getattr(_core_py, name)(*call_args))
            b = np.asarray(getattr(_core, name)(*call_args))
            scale = np.max(np.abs(a)) or 1.0
            assert np.max(np.abs(a - b)) <= 1e-12 * scale, f"{name} mismatch"
            print(f"{name:32s} {t_py*1e3:9.2f}ms {t_c*1e3:9.2f}ms "
                  f"{t_py/t_c:7.2f}x")
        else:
            print(f"{name:32s} {t_py*1e3:9.2f}ms {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
