"""Backend micro-benchmark: numpy vs numba stepping throughput.

Usage: python -m chflow.bench [--n 128] [--steps 200] [--kind bubble]
"""

from __future__ import annotations

import argparse
import time

from .backends import resolve_backend
from .fields import FlowParams
from .grid import make_grid
from .integrator import Stepper
from .scenarios import Scenario, generate


def time_backend(backend: str, n: int, steps: int, kind: str) -> float:
    grid = make_grid(n)
    params = FlowParams()
    # keep the bubble inside its resolvable window on any grid
    lam = min(max(0.3, grid.h), grid.length / 16.0)
    scen = Scenario(kind=kind, scale=lam, amplitude=0.2)
    f0 = generate(scen, grid)
    stepper = Stepper(grid, params, backend=backend)
    state = stepper.init_state(f0)
    state = stepper.step(state, stepper.stable_dt(state))  # warm up (JIT)
    t0 = time.perf_counter()
    for _ in range(steps):
        state = stepper.step(state, stepper.stable_dt(state))
    return (time.perf_counter() - t0) / steps


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--kind", default="bubble")
    args = ap.parse_args(argv)
    results = {}
    for backend in ("numpy", "numba"):
        try:
            resolve_backend(backend)
        except Exception as exc:  # numba may be absent
            print(f"{backend:>6}: unavailable ({exc})")
            continue
        per_step = time_backend(backend, args.n, args.steps, args.kind)
        results[backend] = per_step
        print(f"{backend:>6}: {per_step * 1e3:8.3f} ms/step "
              f"(n={args.n}, {args.steps} steps, {args.kind})")
    if len(results) == 2:
        print(f"speedup: {results['numpy'] / results['numba']:.2f}x "
              f"(numba over numpy)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
