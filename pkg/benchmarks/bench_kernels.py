"""Benchmark the jitted density kernels against the pure-numpy fallback.

Runs the same hot workloads (per-family negative log likelihood, a full MLE
fit, and one parametric bootstrap) under both backends by re-invoking itself
with SHUFDETECT_DISABLE_NUMBA set.  Usage:

    python benchmarks/bench_kernels.py            # prints the comparison table
    python benchmarks/bench_kernels.py --one-mode # timings for this process only
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time

import numpy as np

N_NLL = 20000
NLL_REPS = 200
FIT_SIZE = 2000
BOOT_N = 500
BOOT_B = 99


def run_one_mode() -> dict:
    from shufdetect.statfit import Family, FittedDist, USING_NUMBA, bootstrap_ks, fit_mle, sample
    from shufdetect.statfit._backend import kernels

    results: dict[str, float] = {}
    xs = sample(FittedDist(Family.GAMMA, (2.5, 0.0, 1.5)), N_NLL, 7)

    for fam, params in (
        (Family.GAMMA, (2.5, -0.01, 1.5)),
        (Family.BURR, (2.0, 1.5, -0.01, 1.0)),
        (Family.STUDENT_T, (5.0, 3.0, 1.0)),
        (Family.NORMAL, (3.0, 2.0)),
    ):
        fn = getattr(kernels, f"{fam.value}_nll")
        fn(xs, *params)  # warm-up / jit
        start = time.perf_counter()
        for _ in range(NLL_REPS):
            fn(xs, *params)
        results[f"nll/{fam.value}"] = (time.perf_counter() - start) / NLL_REPS * 1e3

    fit_xs = sample(FittedDist(Family.GAMMA, (2.5, 0.0, 1.5)), FIT_SIZE, 11)
    fit_mle(Family.GAMMA, fit_xs)
    start = time.perf_counter()
    fit_mle(Family.GAMMA, fit_xs)
    results["fit_mle/gamma"] = (time.perf_counter() - start) * 1e3

    boot_xs = sample(FittedDist(Family.GAMMA, (2.0, 0.0, 3.0)), BOOT_N, 13)
    start = time.perf_counter()
    bootstrap_ks(Family.GAMMA, boot_xs, B=BOOT_B, seed=1)
    results["bootstrap_ks/gamma"] = time.perf_counter() - start

    results["_using_numba"] = float(USING_NUMBA)
    return results


def main() -> int:
    if "--one-mode" in sys.argv:
        print(json.dumps(run_one_mode()))
        return 0

    rows = {}
    for label, disable in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, SHUFDETECT_DISABLE_NUMBA=disable)
        out = subprocess.run([sys.executable, __file__, "--one-mode"], env=env,
                             capture_output=True, text=True, check=True)
        rows[label] = json.loads(out.stdout)
        backend = "numba" if rows[label].pop("_using_numba") else "numpy"
        if backend != label:
            print(f"warning: requested {label} backend, got {backend}")

    keys = [k for k in rows["numba"] if not k.startswith("_")]
    unit = {"bootstrap_ks/gamma": "s"}
    print(f"{'workload':<22}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for key in keys:
        u = unit.get(key, "ms")
        a, b = rows["numba"][key], rows["numpy"][key]
        print(f"{key:<22}{a:>10.3f}{u:>2}{b:>10.3f}{u:>2}{b / a:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
