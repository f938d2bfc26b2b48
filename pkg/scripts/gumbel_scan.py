"""Gumbel fits of the largest real part at tau = 0 over a range of sizes."""

import argparse

from gek import finite_n as F
from gek import sampler as S


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--n", type=int, nargs="+", default=[16, 64, 256])
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print("beta      n       loc     scale        KS    p-value")
    for beta in args.beta:
        for n in args.n:
            fit = S.gumbel_experiment(F.EnsembleSpec(beta, n, 0.0), args.trials, seed=args.seed,
                                      workers=args.workers, min_trials=0)
            print(f"{beta:4d} {n:6d} {fit.loc:9.4f} {fit.scale:9.4f} {fit.ks_statistic:9.4f} {fit.p_value:10.2e}")


if __name__ == "__main__":
    main()
