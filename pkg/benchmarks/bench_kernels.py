"""Time the compiled and pure-Python boundary kernels on the same workloads.

    python benchmarks/bench_kernels.py [--fluents 60] [--negatives 8] [--width 3] [--repeat 3]
"""

import argparse
import random
import time

from vslam import _pykernels

try:
    from vslam import _ckernels
except ImportError:
    _ckernels = None


def workload(n, negatives, seed, width=3):
    """A lower boundary of one literal per fluent and failing states that each miss ``width`` of them."""
    rng = random.Random(seed)
    lower = sum(1 << (2 * i + rng.randrange(2)) for i in range(n))
    states = []
    for _ in range(negatives):
        s = lower
        for i in rng.sample(range(n), k=width):
            s ^= 0b11 << (2 * i)
        states.append(s)
    return lower, states


def expand(impl, lower, states):
    upper = [0]
    for s in states:
        upper = impl.uup_update(upper, lower, s)
    return upper


def clock(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fluents", type=int, default=60)
    ap.add_argument("--negatives", type=int, default=8)
    ap.add_argument("--width", type=int, default=3)
    ap.add_argument("--family", type=int, default=3000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    lower, states = workload(args.fluents, args.negatives, args.seed, args.width)
    rng = random.Random(args.seed)
    bits = 2 * args.fluents
    family = [rng.getrandbits(bits) & rng.getrandbits(bits) & rng.getrandbits(bits) for _ in range(args.family)]

    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    results = {}
    for name, impl in backends:
        t_uup, upper = clock(lambda: expand(impl, lower, states), args.repeat)
        t_min, anti = clock(lambda: impl.minimize_antichain(family), args.repeat)
        results[name] = (t_uup, t_min, sorted(upper), sorted(anti))
        print(f"{name:7s} uup_update {t_uup * 1e3:9.2f} ms (|U|={len(upper)})   "
              f"minimize_antichain {t_min * 1e3:9.2f} ms (|A|={len(anti)})")
    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        assert py[2] == cy[2] and py[3] == cy[3], "backends disagree"
        print(f"speedup uup_update x{py[0] / cy[0]:.1f}   minimize_antichain x{py[1] / cy[1]:.1f}")
    else:
        print("compiled extension not built; only the pure-Python backend was timed")


if __name__ == "__main__":
    main()
