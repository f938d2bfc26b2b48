"""Monte Carlo edge densities against the interpolating limit.

Samples the weakly non-Hermitian ensemble at size n and sigma, histograms
the rescaled eigenvalues near the right edge and scores every bin against
the limit density and, as a control, the finite-n density.

    python scripts/mc_edge_density.py --beta 2 --n 100 --sigma 1 --trials 10000
    python scripts/mc_edge_density.py --beta 1 --channel real --trials 10000
"""

import argparse
import time

import numpy as np

from gek import finite_n as F
from gek import limits as L
from gek import sampler as S


def models(beta, spec, sigma, grid, real):
    if real:
        limit = S.bin_average(lambda X: L.density_ai_real_b1(X, sigma), grid)
        finite = S.bin_average(
            lambda X: F.density_real_b1(spec.edge_point(X).real, spec) * spec.n ** (-1 / 6), grid)
        return limit, finite
    if beta == 2:
        limit = S.density_ai_b2_binned(grid, sigma)
        dens = lambda z: F.kernel_b2(z, np.conj(z), spec).real
    elif beta == 4:
        limit = S.bin_average(lambda Z: L.density_ai_b4(Z, sigma), grid)
        dens = lambda z: F.kernel_b4(z, np.conj(z), spec).real
    else:
        limit = S.bin_average(lambda Z: L.density_ai_complex_b1(Z, sigma), grid)
        dens = lambda z: F.density_complex_b1(z, spec)
    finite = S.bin_average(lambda Z: dens(spec.edge_point(Z)) * spec.n ** (-1 / 3), grid)
    return limit, finite


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--beta", type=int, default=2, choices=(1, 2, 4))
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--channel", choices=("complex", "real"), default="complex")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    real = args.channel == "real"
    spec = F.EnsembleSpec.weak(args.beta, args.n, args.sigma)
    t0 = time.perf_counter()
    batch = S.sample_batch(spec, args.seed, args.trials, workers=args.workers)
    if real:
        grid = S.Grid.uniform((-4.0, 2.0), 24)
    else:
        grid = S.Grid.uniform((-3.0, 2.0), 20, (-2.0, 2.0), 16)
    hist = S.accumulate_density(batch, grid, "real_axis" if real else "complex_plane")
    limit, finite = models(args.beta, spec, args.sigma, grid, real)
    vs_limit = S.compare(hist, limit)
    vs_finite = S.compare(hist, finite)
    print(f"beta={args.beta} n={args.n} sigma={args.sigma} trials={args.trials} channel={args.channel}")
    print(f"bins within 3 sigma: limit {vs_limit.fraction_within:.3f}, finite n {vs_finite.fraction_within:.3f}")
    mask = finite > 0.05 * finite.max()
    print(f"largest relative gap limit/finite-n on populated bins: {np.max(np.abs(limit[mask] / finite[mask] - 1)):.3f}")
    print(f"elapsed {time.perf_counter() - t0:.0f} s")


if __name__ == "__main__":
    main()
