"""Timing comparison of the compiled kernels against the numpy fallback.

Drives the four path-functional estimators once per available backend
with identical seeds, so the run doubles as a cross-backend agreement
check: the report includes the relative gap between backends, and the
script exits nonzero if any gap exceeds 1e-9 (accumulation order may
differ, bit equality is not expected across backends).

Usage:
    python3 benchmarks/bench_backends.py [--samples N] [--steps N]
                                         [--repeats R] [--seed S]
"""

import argparse
import sys
import time

import numpy as np

from kptau.wiener import (
    AreaSpec,
    OUSpec,
    PathEnsembleConfig,
    StepBasis,
    area_endpoint_samples,
    embedded_char,
    mc_char,
    ou_exp_mean,
)
from kptau.wiener.backend import available_backends, load_backend

SPEC = AreaSpec(
    lam=[0.28, 0.15],
    a=[[0.10, 0.22], [-0.14, 0.08]],
)
SYM = AreaSpec(lam=[0.28, 0.15], a=[[0.12, 0.18], [0.18, 0.06]])


def _cases(cfg):
    ou = OUSpec.char_reduction(SYM)
    basis = StepBasis.canonical(SPEC.n)
    return [
        ("area char z=i", lambda k: mc_char(SPEC, 1j, cfg, kernels=k).mean),
        ("area char z=0.2", lambda k: mc_char(SPEC, 0.2, cfg, kernels=k).mean),
        ("planar embedding", lambda k: embedded_char(
            SPEC, cfg, basis=basis, kernels=k).mean),
        ("ou exponential", lambda k: ou_exp_mean(ou, cfg, kernels=k).mean),
        ("endpoint samples", lambda k: complex(np.sum(
            area_endpoint_samples(cfg, kernels=k)[0]))),
    ]


def bench(cfg, repeats):
    backends = {name: load_backend(name) for name in available_backends()}
    rows = []
    for label, runner in _cases(cfg):
        timings = {}
        values = {}
        for name, kern in backends.items():
            best = float("inf")
            for _ in range(repeats):
                t0 = time.perf_counter()
                values[name] = runner(kern)
                best = min(best, time.perf_counter() - t0)
            timings[name] = best
        ref = values["numpy"]
        gap = max(
            abs(v - ref) / max(abs(ref), 1e-300) for v in values.values()
        )
        rows.append((label, timings, gap))
    return backends, rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--steps", type=int, default=2048)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=4242)
    args = ap.parse_args(argv)

    cfg = PathEnsembleConfig(
        samples=args.samples, steps=args.steps, seed=args.seed
    )
    backends, rows = bench(cfg, args.repeats)
    names = list(backends)

    print(f"samples={cfg.samples} steps={cfg.steps} seed={cfg.seed} "
          f"repeats={args.repeats}")
    header = f"{'kernel':<18}" + "".join(f"{n + ' (s)':>12}" for n in names)
    if len(names) > 1:
        header += f"{'speedup':>9}"
    header += f"{'rel gap':>10}"
    print(header)
    worst = 0.0
    for label, timings, gap in rows:
        worst = max(worst, gap)
        line = f"{label:<18}" + "".join(f"{timings[n]:>12.3f}" for n in names)
        if len(names) > 1:
            line += f"{timings['numpy'] / timings[names[0]]:>9.1f}x"
        line += f"{gap:>10.1e}"
        print(line)

    if len(names) == 1:
        print("note: compiled kernels unavailable, timed numpy only")
    if worst > 1e-9:
        print(f"FAIL: backends disagree, worst relative gap {worst:.3e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
