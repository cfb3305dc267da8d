#!/usr/bin/env python3
"""Place the empirical Brownian-motion ratio on the constant ladder.

For q in a grid, estimates E[T^(q/2)] / E[sup|B|^q] over [0, T] and prints
the gap to each domination constant evaluated at p = q/2: the general
p^-p/(1-p), the power-function (1-p)^-(1-p) p^-p and the monotone p^-p.
"""

import argparse

from lenglart.bdg import BM_FIXED_TIME, MartingaleSpec, bdg_ratio
from lenglart.oracles import ConstantKind, constant


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=float, nargs="+", default=[0.5, 1.0, 1.5])
    ap.add_argument("--samples", type=int, default=30_000)
    ap.add_argument("--step", type=float, default=1e-3)
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'q':>5} {'ratio':>8} {'monotone':>9} {'power':>8} {'general':>8} "
          f"{'bias':>8}")
    for q in args.q:
        spec = MartingaleSpec(kind=BM_FIXED_TIME, q=q, step=args.step, T=args.T)
        res = bdg_ratio(spec, n_samples=args.samples, seed=args.seed)
        p = q / 2.0
        print(f"{q:>5.2f} {res.ratio.ratio:>8.4f} "
              f"{constant(ConstantKind.MONOTONE, p):>9.4f} "
              f"{constant(ConstantKind.PRATELLI_POWER, p):>8.4f} "
              f"{constant(ConstantKind.LENGLART, p):>8.4f} "
              f"{res.bias_relative_change:>8.4%}")


if __name__ == "__main__":
    main()
