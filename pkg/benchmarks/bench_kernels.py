"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 16] [--repeat 5]

Each kernel runs on identical inputs under every available backend; the
outputs are compared before timing so a speedup never hides a wrong answer.
"""

import argparse
import timeit

import numpy as np

from netdistancing.kernels import backends


def random_masks(n, p, rng):
    adj = np.triu(rng.random((n, n)) < p, 1)
    adj = adj | adj.T
    return [int(sum(1 << j for j in np.flatnonzero(row))) for row in adj], adj.astype(float)


def cases(n, rng):
    masks, adj = random_masks(n, 0.3, rng)
    a = adj.copy()
    np.fill_diagonal(a, 1.0)
    x0 = rng.random(n) + 0.1
    x0 /= x0.sum()
    steps = 20_000

    def run_regular(k):
        return k.regular_mask_table(masks, n, 2)

    def run_union(k):
        return k.neighbor_union_table(masks, n)

    table = backends()["python"].regular_mask_table(masks, n, 1)

    def run_closure(k):
        return k.subset_closure(table, n)

    def run_replicator(k):
        states = np.empty((steps + 1, n))
        payoffs = np.empty(steps + 1)
        done, _ = k.replicator_run(a, x0, 1.0, steps, 0.0, states, payoffs)
        return states[: done + 1]

    return {
        f"regular_mask_table (n={n})": run_regular,
        f"neighbor_union_table (n={n})": run_union,
        f"subset_closure (n={n})": run_closure,
        f"replicator_run ({steps} steps)": run_replicator,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    impls = backends()
    if "cython" not in impls:
        print("compiled backend not built; timing the python fallback only")
    rng = np.random.default_rng(args.seed)
    names = list(impls)
    print(f"{'kernel':34s}" + "".join(f"{b:>12s}" for b in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases(args.n, rng).items():
        outs = [np.asarray(fn(impls[b])) for b in names]
        for o in outs[1:]:
            if o.shape != outs[0].shape or not np.allclose(o, outs[0], rtol=0, atol=1e-12):
                raise SystemExit(f"{label}: backends disagree")
        times = [min(timeit.repeat(lambda b=b: fn(impls[b]), number=1, repeat=args.repeat)) for b in names]
        row = f"{label:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(names) > 1:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
