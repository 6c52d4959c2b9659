"""Empirical lower bounds for Ladyzhenskaya-type constants as the sample count grows."""
from __future__ import annotations

import argparse

from nsgalerkin.fields import Grid
from nsgalerkin.gns import GNSParams, estimate_constant


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--samples", type=int, nargs="+", default=[1, 4, 16, 64])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("d,sigma,n_samples,c_lower")
    for d in args.dims:
        params = GNSParams.ladyzhenskaya(d)
        for n in args.samples:
            est = estimate_constant(params, Grid(d, args.n), n, seed=args.seed)
            print(f"{d},{params.sigma},{n},{est.c_lower:.10g}")


if __name__ == "__main__":
    main()
