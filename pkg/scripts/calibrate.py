"""Success fraction of one builder over a list of p values.

Prints the constant C implied by each p under the family's window
(bipartite sqrt(log n / n), even log n / n^((g-2)/g), odd (log n / n^k)^(1/(k+1)))
so that the slow Monte Carlo tests can be pinned to calibrated constants.

    python3 scripts/calibrate.py even 6 3002 0.9,0.8,0.7 --trials 5
"""

import argparse
import math
import time
from collections import Counter

from girthplanar.builder import BuildConfig, build


def window(family: str, g: int, n: int) -> float:
    if family == "bipartite":
        return math.sqrt(math.log(n) / n)
    if family == "even":
        return math.log(n) / n ** ((g - 2) / g)
    k = (g - 1) // 2
    return (math.log(n) / n ** k) ** (1 / (k + 1))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("family", choices=["bipartite", "even", "odd"])
    ap.add_argument("g", type=int)
    ap.add_argument("n", type=int)
    ap.add_argument("ps", help="comma-separated edge probabilities")
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    base = window(args.family, args.g, args.n)
    cfg = BuildConfig(planarity_check=False)
    for p in (float(x) for x in args.ps.split(",")):
        t0 = time.perf_counter()
        wins = 0
        fails = Counter()
        for s in range(args.seed, args.seed + args.trials):
            out = build(args.family, args.n, args.g, p, s, cfg)
            wins += out.success
            if not out.success:
                fails[out.failed_stage] += 1
        dt = (time.perf_counter() - t0) / args.trials
        print(f"{args.family} g={args.g} n={args.n} p={p:.4f} C={p / base:.2f} "
              f"{wins}/{args.trials} failures={dict(fails)} {dt:.1f}s/build", flush=True)


if __name__ == "__main__":
    main()
