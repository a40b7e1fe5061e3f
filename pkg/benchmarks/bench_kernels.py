"""Timing comparison between the compiled and numpy kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--repeats N]

Measures the raw hot kernels (steering vector, channel synthesis, beam-pair
sweep) and a full environment rollout, once per backend.
"""

import argparse
import math
import time

import numpy as np

from caviar import _kernels
from caviar.config import load_config
from caviar.env import BeamSelectionEnv


def time_call(fn, repeats):
    best = math.inf
    for _ in range(3):
        start = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - start) / repeats)
    return best


def bench_backend(name, repeats):
    _kernels.use_backend(name)
    n_t, n_r, n_paths = 64, 1, 3
    rng = np.random.default_rng(0)
    gains = rng.normal(size=n_paths) + 1j * rng.normal(size=n_paths)
    aods = rng.uniform(-1.2, 1.2, size=n_paths)
    aoas = rng.uniform(-1.2, 1.2, size=n_paths)
    ct = _kernels.dft_codebook(n_t)
    cr = _kernels.dft_codebook(n_r)
    h = _kernels.synthesize_channel(gains, aods, aoas, n_t, n_r)

    rows = {
        f"steering_vector(N={n_t})": time_call(
            lambda: _kernels.steering_vector(n_t, 0.42), repeats
        ),
        f"synthesize_channel(L={n_paths}, {n_r}x{n_t})": time_call(
            lambda: _kernels.synthesize_channel(gains, aods, aoas, n_t, n_r), repeats
        ),
        f"pair_magnitudes({n_r}x{n_t} -> {n_t * n_r})": time_call(
            lambda: _kernels.pair_magnitudes(h, ct, cr), repeats
        ),
    }

    cfg = load_config("configs/fig8.json")
    env = BeamSelectionEnv(cfg.env)

    def rollout():
        env.reset(seed=0)
        for _ in range(cfg.env.steps):
            env.step(0)

    steps = cfg.env.steps
    rows[f"env rollout ({steps} steps)"] = time_call(rollout, max(1, repeats // 20000))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20000, help="kernel call count")
    args = parser.parse_args()

    results = {}
    for name in _kernels.available_backends():
        results[name] = bench_backend(name, args.repeats)
    if "compiled" not in results:
        print("note: compiled backend unavailable, showing numpy only")

    names = list(results)
    width = max(len(k) for rows in results.values() for k in rows)
    header = f"{'kernel':<{width}}" + "".join(f"{n:>14}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for key in next(iter(results.values())):
        line = f"{key:<{width}}"
        times = [results[n][key] for n in names]
        for t in times:
            line += f"{t * 1e6:>12.2f}us"
        if len(times) == 2:
            slow, fast = (
                (times[0], times[1]) if names[1] == "compiled" else (times[1], times[0])
            )
            line += f"{slow / fast:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
