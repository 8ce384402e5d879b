"""Recovery rate of planted Jordan structures under conjugation and noise."""

import argparse

import numpy as np

from curvspec.grassmann import rng_for
from curvspec.jordan import jordan_type, planted_example, same_type


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-dim", type=int, default=8)
    ap.add_argument("--noise", type=float, nargs="*", default=[0.0, 1e-14, 1e-12],
                    help="relative entrywise perturbations to add")
    args = ap.parse_args()
    print(f"{'noise':>8} {'exact':>7} {'wrong':>7} {'uncertain':>10}")
    for noise in args.noise:
        exact = wrong = unc = 0
        for i in range(args.cases):
            rng = rng_for(args.seed, "bench", i)
            M, want = planted_example(rng, max_dim=args.max_dim)
            if noise:
                M = M + noise * np.linalg.norm(M, 2) * rng.standard_normal(M.shape)
            got = jordan_type(M)
            if got.uncertain:
                unc += 1
            elif same_type(got, want):
                exact += 1
            else:
                wrong += 1
        print(f"{noise:>8.0e} {exact:>7} {wrong:>7} {unc:>10}")


if __name__ == "__main__":
    main()
