"""Benchmark the compiled kernels against the pure-Python/NumPy fallback.

Runs the two hot loops behind the Monte Carlo engines — the OU intensity
scan used by the thermal simulator and the exponential-sum root solve used
by the DPO simulator — through both implementations and reports wall-clock
ratios plus agreement checks.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from photonwait._kernels import BACKEND, ou_intensity, expsum_solve
from photonwait._kernels import reference


def _time(fn, args, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_ou(repeat: int):
    rng = np.random.default_rng(12345)
    n = 1 << 21
    rho, sig = 0.9996, 0.02
    noise = rng.standard_normal((2, n))
    args = (noise[0].copy(), noise[1].copy(), rho, sig, 0.3, -0.1)
    t_fast, out_fast = _time(ou_intensity, args, repeat)
    t_ref, out_ref = _time(reference.ou_intensity, args, repeat)
    err = float(np.max(np.abs(out_fast[0] - out_ref[0])))
    return t_fast, t_ref, err


def bench_expsum(repeat: int):
    rng = np.random.default_rng(6789)
    k = 12
    w = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) * 0.1
    w[0] = 1.0 + 0.0j
    mu = -np.abs(rng.standard_normal(k)) + 1j * rng.standard_normal(k)
    mu[0] = -0.5 + 0.0j
    us = rng.uniform(0.05, 0.95, size=2000)

    def run(solver):
        return np.array([solver(w, mu, u) for u in us])

    t_fast, out_fast = _time(run, (expsum_solve,), repeat)
    t_ref, out_ref = _time(run, (reference.expsum_solve,), repeat)
    err = float(np.max(np.abs(out_fast - out_ref)))
    return t_fast, t_ref, err


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"selected kernel backend: {BACKEND}")
    for name, fn in (("ou_intensity", bench_ou), ("expsum_solve", bench_expsum)):
        t_fast, t_ref, err = fn(args.repeat)
        ratio = t_ref / t_fast if t_fast > 0 else float("inf")
        print(
            f"{name:13s}  backend {t_fast * 1e3:8.2f} ms   "
            f"pure {t_ref * 1e3:8.2f} ms   speedup {ratio:5.2f}x   "
            f"max|diff| {err:.2e}"
        )


if __name__ == "__main__":
    main()
