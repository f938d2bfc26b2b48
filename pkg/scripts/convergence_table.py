"""Finite-n beta = 2 kernel against the interpolating Airy kernel.

Prints the worst relative error over the probe pairs for each n together
with err * n^{1/3}; a flat last column means the leading correction is
of order n^{-1/3}.
"""

import argparse

from gek import checks as C


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--n", type=int, nargs="+", default=[50, 100, 200, 400, 800, 1600])
    args = ap.parse_args()
    errors = C.convergence_errors(args.sigma, tuple(args.n))
    print("     n     error   error*n^(1/3)")
    for n, e in zip(args.n, errors):
        print(f"{n:6d}  {e:8.4f}  {e * n ** (1 / 3):8.4f}")


if __name__ == "__main__":
    main()
