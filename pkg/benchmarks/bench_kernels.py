"""Compare the numba and numpy kernel paths on long walks.

    python benchmarks/bench_kernels.py [--steps 2000] [--repeat 5]

Both paths run the same random position-dependent protocol.  Coin arrays
are prebuilt, so only the fused coin+shift kernel is timed.  Final states
are checked for agreement before timings are printed.
"""
import argparse
import math
import time

import numpy as np

from walkpovm import _kernels
from walkpovm.core import Angle, CoinState, StepSpec, WalkState


def make_specs(steps, seed):
    rng = np.random.default_rng(seed)
    return [
        StepSpec({x: Angle(float(rng.uniform(0, math.pi / 4))) for x in range(-n - 1, n + 2)})
        for n in range(steps)
    ]


def site_coin_stack(specs):
    """Per-step coin arrays; step n acts on sites -n..n."""
    return [spec.site_coins(-n, 2 * n + 1) for n, spec in enumerate(specs)]


def walk(kernels, coin_stack):
    amps = WalkState.localized(CoinState(math.sqrt(0.5), 1j * math.sqrt(0.5))).amps
    for coins in coin_stack:
        amps = kernels["coin_shift"](amps, coins)
    return amps


def bench(backend, coin_stack, repeat):
    kernels = _kernels.get_kernels(backend)
    walk(kernels, coin_stack[:3])  # JIT warm-up
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = walk(kernels, coin_stack)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    stack = site_coin_stack(make_specs(args.steps, args.seed))
    t_np, a_np = bench("numpy", stack, args.repeat)
    print(f"numpy : {t_np * 1e3:9.2f} ms for {args.steps} steps")
    if not _kernels.numba_available():
        print("numba : not available")
        return
    t_nb, a_nb = bench("numba", stack, args.repeat)
    assert np.allclose(a_np, a_nb, atol=1e-12)
    print(f"numba : {t_nb * 1e3:9.2f} ms for {args.steps} steps  (speed-up x{t_np / t_nb:.2f})")
    print(f"norm  : {np.sum(np.abs(a_nb) ** 2):.15f}")


if __name__ == "__main__":
    main()
