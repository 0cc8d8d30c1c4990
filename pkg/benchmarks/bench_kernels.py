"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--rounds R] [--users N] [--repeat K]

Both backends get the same draws; the script also checks that their counts
agree before reporting timings.
"""

import argparse
import time

import numpy as np

from bmnc import _fallback
from bmnc.channel import ladder_profile
from bmnc.matrix import design, enumerate_valid_packed
from bmnc.simulator import block_rng

try:
    from bmnc import _kernels
except ImportError:
    _kernels = None


def inputs(n, rounds, seed=1):
    rng = block_rng(seed, 0)
    prof = ladder_profile(n, 10.0)
    f = design(n)
    x = rng.integers(0, 2, size=(rounds, n), dtype=np.uint8)
    up = rng.standard_normal((rounds, n, 4))
    down = rng.standard_normal((rounds, n, n - 1, 4))
    down_fwd = rng.standard_normal((rounds, n, n, 4))
    inv = np.ascontiguousarray(np.stack([f.inverse(i) for i in range(1, n + 1)]))
    return dict(
        nc=(x, up, down, np.sqrt(prof.uplink), np.sqrt(prof.downlink),
            np.ascontiguousarray(f.f), inv, False),
        no_nc=(x, up, down_fwd, np.sqrt(prof.no_nc_uplink),
               np.ascontiguousarray(np.sqrt(prof.no_nc_downlink))),
    )


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=1 << 16)
    ap.add_argument("--users", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
    backends = [("python", _fallback)] + ([("cython", _kernels)] if _kernels else [])
    data = inputs(args.users, args.rounds)
    search_rows = list(enumerate_valid_packed(5))

    jobs = {
        "nc_block": lambda k: k.nc_block(*data["nc"]),
        "no_nc_block": lambda k: k.no_nc_block(*data["no_nc"]),
        "inverse_column_weights (N=5, all)": lambda k: [
            k.inverse_column_weights(list(r), 5) for r in search_rows
        ],
    }
    print(f"rounds={args.rounds} users={args.users} repeat={args.repeat}")
    print(f"{'kernel':38s} " + " ".join(f"{name:>10s}" for name, _ in backends) + "   speedup")
    for label, job in jobs.items():
        results = [best_of(lambda k=k: job(k), args.repeat) for _, k in backends]
        outs = [r[1] for r in results]
        for other in outs[1:]:
            a, b = outs[0], other
            same = (all(np.array_equal(p, q) for p, q in zip(a, b))
                    if isinstance(a, (tuple, list)) else np.array_equal(a, b))
            if not same:
                raise SystemExit(f"{label}: backends disagree")
        secs = [r[0] for r in results]
        speed = f"{secs[0] / secs[-1]:8.1f}x" if len(secs) > 1 else ""
        print(f"{label:38s} " + " ".join(f"{s:10.4f}" for s in secs) + f"   {speed}")


if __name__ == "__main__":
    main()
