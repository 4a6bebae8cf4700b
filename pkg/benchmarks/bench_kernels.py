"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--degrees 3 4 5] [--starts 2000] [--repeat 3]

Reports best-of-``repeat`` wall time for full path tracking at each degree
and for batched Newton refinement of random starts.
"""
import argparse
import time

import numpy as np

from ulampoly import _backend
from ulampoly.homotopy import TrackerConfig, track_all


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degrees", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--starts", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = _backend.available()
    print(f"backends: {', '.join(backends)}")
    rows = []
    for n in args.degrees:
        cfg = TrackerConfig(seed=0)
        rows.append((f"track_all n={n}", {b: best_of(lambda b=b: track_all(n, cfg, threads=1, backend=b), args.repeat)
                                          for b in backends}))
    rng = np.random.default_rng(0)
    pts = rng.uniform(-2, 2, (args.starts, 4)) + 1j * rng.uniform(-2, 2, (args.starts, 4))
    rows.append((f"refine_batch {args.starts}x4",
                 {b: best_of(lambda b=b: _backend.load(b).refine_batch(pts, 1e-12, 50), args.repeat) for b in backends}))

    head = f"{'case':<24}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        head += f"{'speedup':>10}"
    print(head)
    for name, t in rows:
        line = f"{name:<24}" + "".join(f"{t[b]:>11.3f}s" for b in backends)
        if len(backends) == 2:
            line += f"{t['python'] / t['cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
