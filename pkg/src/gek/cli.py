"""Command line: densities and kernels on grids, check suites, sampling runs.

Regime and flag matrix
----------------------
  finite     --n and --tau; coordinates are raw eigenvalue positions z = x + iy
  limit      --sigma; edge coordinates Z = X + iY (interpolating kernels)
  hermitian  no parameter; sigma -> 0 forms on the real line (Y = 0)
  strong     no parameter; coordinates Zhat = Z / sigma as sigma -> infinity
  bulk       --sigma; beta = 2 only, bulk coordinates

``sample`` takes --n with exactly one of --tau or --sigma (tau = 1 - sigma^2 n^{-1/3}).

Exit codes: 0 success, 2 usage error, 3 numeric or statistical failure.
"""

from __future__ import annotations

import argparse
import math
import re
import shlex
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import checks as C
from . import finite_n as F
from . import limits as L
from . import sampler as S
from .errors import CapacityError, ConvergenceError, DomainError, GekError, RangeError, UsageError
from .records import CurveRecord, GridSpec

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
REGIMES = ("finite", "limit", "hermitian", "strong", "bulk")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--beta", type=int, choices=(1, 2, 4), default=2)
    p.add_argument("--n", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = _Parser(prog="gek", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("density", help="one-point density on a grid")
    k = sub.add_parser("kernel", help="kernel K(z1, z2) with z1 on a grid and z2 fixed")
    for p in (d, k):
        _common(p)
        p.add_argument("--regime", choices=REGIMES, default="limit")
        p.add_argument("--grid", type=GridSpec.parse, required=True, help="X axis MIN:MAX:STEPS")
        p.add_argument("--y", type=float, default=0.0, help="fixed Y when --ygrid is absent")
        p.add_argument("--channel", choices=("complex", "real"), default="complex")
    d.add_argument("--ygrid", type=GridSpec.parse, help="Y axis MIN:MAX:STEPS for a 2-D table")
    k.add_argument("--x2", type=float, default=0.0)
    k.add_argument("--y2", type=float, default=0.0)

    c = sub.add_parser("check", help="run a named suite of numerical checks")
    c.add_argument("suite", help=f"one of {', '.join(C.SUITES)}, all")
    c.add_argument("--out", type=Path)
    c.add_argument("--format", choices=("csv", "json"), default="csv")

    s = sub.add_parser("sample", help="Monte Carlo spectra, edge histogram and comparisons")
    _common(s)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--channel", choices=("complex", "real"), default="complex")
    s.add_argument("--grid", type=GridSpec.parse, default=GridSpec(-4.0, 2.0, 13),
                   help="histogram bin edges in X (MIN:MAX:EDGES)")
    s.add_argument("--ygrid", type=GridSpec.parse, default=GridSpec(-2.0, 2.0, 9),
                   help="histogram bin edges in Y for the complex channel")
    s.add_argument("--compare", choices=("none", "limit", "finite"), default="none")
    s.add_argument("--band-fraction", type=float, default=0.9,
                   help="minimum fraction of bins with |z| < 3 for --compare to succeed")
    s.add_argument("--gumbel", action="store_true", help="fit a Gumbel law to the largest real parts")
    s.add_argument("--workers", type=int, default=1)
    return parser


# ---------------------------------------------------------------------------
# argument validation


def _validate_regime(args):
    if args.regime == "finite":
        if args.n is None or args.tau is None:
            raise UsageError("the finite regime needs --n and --tau")
        if args.sigma is not None:
            raise UsageError("--sigma is not used in the finite regime (give --tau)")
        return F.EnsembleSpec(args.beta, args.n, args.tau)
    if args.tau is not None or args.n is not None:
        raise UsageError(f"--n/--tau are only used in the finite regime, not {args.regime!r}")
    if args.regime in ("limit", "bulk"):
        if args.sigma is None:
            raise UsageError(f"the {args.regime} regime needs --sigma")
        if not args.sigma > 0:
            raise UsageError("--sigma must be positive")
    elif args.sigma is not None:
        raise UsageError(f"--sigma is not used in the {args.regime} regime")
    if args.regime == "bulk" and args.beta != 2:
        raise UsageError("the bulk regime is available for beta = 2 only")
    if args.channel == "real" and args.beta != 1:
        raise UsageError("the real channel exists for beta = 1 only")
    return None


def _meta(args, argv, regime, **extra):
    meta = {
        "beta": args.beta,
        "regime": regime,
        "n": args.n if args.n is not None else "limit",
        "tau": args.tau if args.tau is not None else "",
        "sigma": args.sigma if args.sigma is not None else "",
        "command": shlex.join(["gek", *argv]),
        "seed": getattr(args, "seed", ""),
        "version": __version__,
    }
    meta.update(extra)
    return meta


# ---------------------------------------------------------------------------
# density and kernel


def density_value(beta, regime, z, channel, spec=None, sigma=None):
    """Density at one point for a (beta, regime, channel) combination."""
    z = complex(z)
    if regime == "finite":
        if channel == "real":
            return float(F.density_real_b1(z.real, spec))
        if beta == 2:
            return float(F.kernel_b2(z, z.conjugate(), spec).real)
        if beta == 4:
            return float(F.kernel_b4(z, z.conjugate(), spec).real)
        return float(F.density_complex_b1(z, spec))
    if regime == "limit":
        return float(np.real(L.density(beta, z, sigma, channel)))
    if regime == "hermitian":
        if beta == 2:
            return L.hermitian_airy_kernel(z.real, z.real)
        if beta == 4:
            return L.hermitian_density_b4(z.real)
        if channel != "real":
            raise UsageError("in the hermitian regime beta = 1 has only the real channel")
        return L.hermitian_density_real_b1(z.real)
    if regime == "strong":
        return float(np.real(L.strong_edge_density(beta, z, channel)))
    if regime == "bulk":
        return float(L.bulk_sine_kernel(z, z.conjugate(), sigma).real)
    raise UsageError(f"unknown regime {regime!r}")


def kernel_value(beta, regime, z1, z2, spec=None, sigma=None):
    z1, z2 = complex(z1), complex(z2)
    if regime == "finite":
        if beta == 2:
            return complex(F.kernel_b2(z1, z2, spec))
        if beta == 4:
            return complex(F.kernel_b4(z1, z2, spec))
        return F.matrix_kernel_b1(z1, z2, spec).khat
    if regime == "limit":
        fn = {2: L.kernel_ai_b2, 4: L.kernel_ai_b4, 1: L.prekernel_ai_b1}[beta]
        return complex(fn(z1, z2, sigma))
    if regime == "hermitian":
        if z1.imag or z2.imag:
            raise UsageError("hermitian kernels take real arguments (--y 0 --y2 0)")
        if beta == 2:
            return complex(L.hermitian_airy_kernel(z1.real, z2.real))
        if beta == 4:
            return complex(L.hermitian_elements_b4(z1.real, z2.real).T2)
        return complex(L.hermitian_elements_b1(z1.real, z2.real).khat)
    if regime == "strong":
        out = L.strong_edge_kernel(beta, z1, z2)
        return complex(out.khat if beta == 1 else out)
    return complex(L.bulk_sine_kernel(z1, z2, sigma))


def cmd_density(args, argv):
    spec = _validate_regime(args)
    xs = args.grid.points()
    if args.ygrid is not None and (args.channel == "real" or args.regime == "hermitian"):
        raise UsageError("--ygrid applies to complex-plane densities only")
    ys = args.ygrid.points() if args.ygrid is not None else np.array([args.y])
    one_d = args.channel == "real" or args.regime == "hermitian"
    rows = []
    for x in xs:
        if one_d:
            rows.append([float(x), density_value(args.beta, args.regime, x, args.channel, spec, args.sigma)])
            continue
        for y in ys:
            val = density_value(args.beta, args.regime, complex(x, y), args.channel, spec, args.sigma)
            rows.append([float(x), float(y), val])
    coords = ["x", "y"] if args.regime == "finite" else ["X", "Y"]
    columns = [coords[0], "density"] if one_d else [*coords, "density"]
    meta = _meta(args, argv, args.regime, channel=args.channel)
    return CurveRecord(meta, columns, rows), EXIT_OK


def cmd_kernel(args, argv):
    spec = _validate_regime(args)
    z2 = complex(args.x2, args.y2)
    rows = []
    for x in args.grid.points():
        val = kernel_value(args.beta, args.regime, complex(x, args.y), z2, spec, args.sigma)
        rows.append([float(x), args.y, z2.real, z2.imag, val.real, val.imag])
    meta = _meta(args, argv, args.regime)
    return CurveRecord(meta, ["X1", "Y1", "X2", "Y2", "re", "im"], rows), EXIT_OK


# ---------------------------------------------------------------------------
# checks


def cmd_check(args, argv):
    results = C.run_suite(args.suite)
    meta = {"beta": "", "regime": "check", "n": "", "tau": "", "sigma": "",
            "command": shlex.join(["gek", *argv]), "seed": "", "version": __version__,
            "suite": args.suite, "passed": int(all(r.passed for r in results))}
    record = CurveRecord(meta, list(C.COLUMNS), [r.row() for r in results])
    return record, EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# sampling


def _sample_spec(args):
    if args.n is None:
        raise UsageError("sample needs --n")
    if (args.tau is None) == (args.sigma is None):
        raise UsageError("sample needs exactly one of --tau and --sigma")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.tau is not None:
        return F.EnsembleSpec(args.beta, args.n, args.tau)
    return F.EnsembleSpec.weak(args.beta, args.n, args.sigma)


def _grid_for(args):
    x = args.grid.points()
    if args.channel == "real":
        if args.beta != 1:
            raise UsageError("the real channel exists for beta = 1 only")
        return S.Grid(x)
    return S.Grid(x, args.ygrid.points())


def _model(args, spec, grid):
    """Bin-averaged model density in edge coordinates, or None."""
    real = args.channel == "real"
    if args.compare == "limit":
        sigma = math.sqrt((1.0 - spec.tau) * spec.n ** (1.0 / 3.0))
        if not 0 < sigma <= L.SIGMA_MAX:
            raise UsageError(f"limit comparison needs 0 < sigma <= {L.SIGMA_MAX:g}, got {sigma:g}")
        if args.beta == 2 and not real:
            return S.density_ai_b2_binned(grid, sigma)
        return S.bin_average(lambda Z: float(np.real(L.density(args.beta, Z, sigma,
                                                                 "real" if real else "complex"))), grid)
    if args.compare == "finite":
        jac = spec.n ** (-1.0 / 6.0) if real else spec.n ** (-1.0 / 3.0)
        channel = "real" if real else "complex"
        return S.bin_average(lambda Z: jac * density_value(args.beta, "finite", spec.edge_point(Z),
                                                           channel, spec), grid)
    return None


def _write(record, path, fmt):
    text = record.dump(fmt)
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def _eigen_path(path):
    path = Path(path)
    return path.with_name(f"{path.stem}-eigenvalues{path.suffix}")


def cmd_sample(args, argv):
    spec = _sample_spec(args)
    batch = S.sample_batch(spec, args.seed, args.trials, workers=args.workers)
    base_meta = _meta(args, argv, "finite", n=spec.n, tau=spec.tau,
                      sigma=args.sigma if args.sigma is not None else "", trials=args.trials)
    base_meta["seed"] = args.seed

    if args.gumbel:
        fit = S.gumbel_fit(batch.max_real_parts())
        meta = dict(base_meta, report="gumbel")
        record = CurveRecord(meta, ["loc", "scale", "ks_statistic", "p_value", "samples"],
                             [[fit.loc, fit.scale, fit.ks_statistic, fit.p_value, fit.samples]])
        return record, EXIT_OK if fit.p_value > 0.01 else EXIT_NUMERIC

    if args.out is not None:
        eig = CurveRecord(dict(base_meta, report="eigenvalues"), ["trial", "re", "im", "channel"],
                          [list(r) for r in batch.rows()])
        _write(eig, _eigen_path(args.out), args.format)

    grid = _grid_for(args)
    channel = "real_axis" if args.channel == "real" else "complex_plane"
    hist = S.accumulate_density(batch, grid, channel)
    dens, errs = hist.density(), hist.errors()
    model = _model(args, spec, grid)
    comparison = S.compare(hist, model) if model is not None else None

    xc = 0.5 * (grid.x_edges[:-1] + grid.x_edges[1:])
    rows = []
    if grid.y_edges is None:
        columns = ["X", "count", "density", "stat_error"]
        for i, x in enumerate(xc):
            row = [float(x), int(hist.counts[i]), float(dens[i]), float(errs[i])]
            if comparison is not None:
                row += [float(comparison.model[i]), float(comparison.z_scores[i])]
            rows.append(row)
    else:
        columns = ["X", "Y", "count", "density", "stat_error"]
        yc = 0.5 * (grid.y_edges[:-1] + grid.y_edges[1:])
        for i, x in enumerate(xc):
            for j, y in enumerate(yc):
                row = [float(x), float(y), int(hist.counts[i, j]), float(dens[i, j]), float(errs[i, j])]
                if comparison is not None:
                    row += [float(comparison.model[i, j]), float(comparison.z_scores[i, j])]
                rows.append(row)
    if comparison is not None:
        columns += ["model", "z_score"]
    meta = dict(base_meta, report="histogram", channel=args.channel, multiplicity=hist.multiplicity)
    code = EXIT_OK
    if comparison is not None:
        meta["compare"] = args.compare
        meta["fraction_within_3sigma"] = comparison.fraction_within
        if comparison.fraction_within < args.band_fraction:
            code = EXIT_NUMERIC
    return CurveRecord(meta, columns, rows), code


_NEGATIVE = re.compile(r"^-[0-9.]")


def _attach_negative_values(argv):
    """Join ``--opt -6:2:81`` into ``--opt=-6:2:81``; argparse would take -6:2:81 for a flag."""
    out = []
    for tok in argv:
        if out and _NEGATIVE.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


COMMANDS = {"density": cmd_density, "kernel": cmd_kernel, "check": cmd_check, "sample": cmd_sample}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_attach_negative_values(argv))
        record, code = COMMANDS[args.command](args, argv)
        _write(record, args.out, args.format)
        return code
    except (UsageError, DomainError) as exc:
        print(f"gek: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RangeError, ConvergenceError, CapacityError, GekError, FloatingPointError) as exc:
        print(f"gek: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
