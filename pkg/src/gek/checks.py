"""Named suites of numerical self-checks with measured residuals.

Each suite returns a list of :class:`CheckResult`; the command line turns
them into a table and exits non-zero if any fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import finite_n as F
from . import limits as L
from .errors import UsageError
from .specfun import pfaffian

SUITES = ("identities", "hermitian", "strong", "bulk", "poisson", "convergence", "plumbing")


@dataclass
class CheckResult:
    suite: str
    name: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""

    def row(self):
        return [self.suite, self.name, float(self.residual), float(self.tolerance),
                int(self.passed), self.detail]


COLUMNS = ["suite", "check", "residual", "tolerance", "passed", "detail"]


def _result(suite, name, residual, tol, detail=""):
    residual = float(residual)
    return CheckResult(suite, name, residual, tol, bool(residual <= tol), detail)


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale else 0.0


# ---------------------------------------------------------------------------
# exact finite-N identities


def random_pairs(n, tau, count, rng):
    """Random argument pairs inside the droplet (complex, complex, real)."""
    a, b = (1.0 + tau) * math.sqrt(n), (1.0 - tau) * math.sqrt(n) + 0.5
    z1 = rng.uniform(-a, a, count) + 1j * rng.uniform(-b, b, count)
    z2 = rng.uniform(-a, a, count) + 1j * rng.uniform(-b, b, count)
    x2 = rng.uniform(-a, a, count)
    return z1, z2, x2


def identity_residuals(ns=(4, 6, 8, 10), taus=(0.1, 0.5, 0.9), pairs=20, seed=0):
    """Largest b1-b2 pre-kernel and G^R two-route residuals over the sweep."""
    rng = np.random.default_rng(seed)
    worst_k, worst_g = 0.0, 0.0
    for n in ns:
        for tau in taus:
            spec = F.EnsembleSpec(1, n, tau)
            z1, z2, x2 = random_pairs(n, tau, pairs, rng)
            worst_k = max(worst_k, float(np.max(F.identity_b1_b2_residual(z1, z2, spec))))
            worst_g = max(worst_g, max(F.identity_gr_residual(a, b, spec) for a, b in zip(z1, x2)))
    return worst_k, worst_g


IJ_PROBES = ((-1.5, 0.3), (0.25, 0.5), (0.7, 0.1), (2.0, 0.8), (-0.4, 0.95))


def ij_oracle_residual(probes=IJ_PROBES, jmax=12):
    worst = 0.0
    for x, tau in probes:
        for j in range(jmax + 1):
            worst = max(worst, _rel(F.i_j(x, tau, j), F.i_j_quadrature(x, tau, j)))
    return worst


def ij_recurrence_residual(probes=IJ_PROBES, jmax=30):
    return max(F.i_j_recurrence_residual(x, tau, j) for x, tau in probes for j in range(jmax + 1))


def suite_identities():
    k, g = identity_residuals()
    return [
        _result("identities", "prekernel_b1_vs_b2", k, 1e-10, "N in 4..10, tau in .1,.5,.9"),
        _result("identities", "g_real_two_routes", g, 1e-10, "N in 4..10, tau in .1,.5,.9"),
        _result("identities", "i_j_vs_quadrature", ij_oracle_residual(), 1e-8, "j <= 12"),
        _result("identities", "i_j_recurrence", ij_recurrence_residual(), 1e-10, "j <= 30"),
    ]


# ---------------------------------------------------------------------------
# sigma -> 0


AIRY_PROBES = (-2.0, -1.0, 0.0, 1.0, 2.0)
HERMITIAN_SIGMAS = (0.4, 0.2, 0.1, 0.05)


def airy_identity_residuals(xs=AIRY_PROBES):
    diag = max(_rel(L.airy_kernel_integral(X, X), L.hermitian_airy_kernel(X, X)) for X in xs)
    off = max(_rel(L.airy_kernel_integral(X, X + 0.7), L.hermitian_airy_kernel(X, X + 0.7))
              for X in xs)
    return diag, off


def reduced_b2_kernel(X1, X2, sigma):
    """sigma sqrt(pi) e^{-sigma^6/6 - sigma^2 (X1+X2)/2} K_Ai(X1, X2), which tends to K_Airy."""
    k = L.kernel_ai_b2(X1, X2, sigma)
    return (sigma * math.sqrt(math.pi) * math.exp(-sigma**6 / 6 - sigma**2 * (X1 + X2) / 2) * k).real


def hermitian_b2_sweep(sigmas=HERMITIAN_SIGMAS, xs=AIRY_PROBES):
    return [max(_rel(reduced_b2_kernel(X, X, s), L.hermitian_airy_kernel(X, X)) for X in xs)
            for s in sigmas]


def ridge_density_b4(X, sigma, nodes=40, width=7.0):
    """Integral of the beta = 4 density over Y, using its symmetry in Y."""
    x, w = leggauss(nodes)
    top = width * sigma
    ys, ws = 0.5 * top * (x + 1), 0.5 * top * w
    return 2 * sum(wi * L.density_ai_b4(complex(X, yi), sigma) for yi, wi in zip(ys, ws))


def hermitian_b4_residual(sigma=0.05, xs=(-2.0, -1.0, 0.0, 0.5, 1.0)):
    return max(_rel(ridge_density_b4(X, sigma), L.hermitian_density_b4(X)) for X in xs)


def hermitian_b1_residual(sigma=0.05, xs=(-2.0, -1.0, 0.0, 0.5, 1.0)):
    return max(_rel(L.density_ai_real_b1(X, sigma), L.hermitian_density_real_b1(X)) for X in xs)


def t_identity_residuals(pairs=((-0.7, 0.4), (0.3, -1.2), (1.1, 0.2)), h=1e-4):
    sym, deriv = 0.0, 0.0
    for X1, X2 in pairs:
        T = L.hermitian_elements_b4(X1, X2)
        sym = max(sym, abs(T.T2 - L.hermitian_elements_b4(X2, X1).T3))
        up = L.hermitian_elements_b4(X1, X2 + h).T2
        down = L.hermitian_elements_b4(X1, X2 - h).T2
        deriv = max(deriv, abs(T.T4 - (up - down) / (2 * h)))
    return sym, deriv


def suite_hermitian():
    diag, off = airy_identity_residuals()
    sweep = hermitian_b2_sweep()
    monotone = all(b < a for a, b in zip(sweep, sweep[1:]))
    table = " ".join(f"{s}:{e:.2e}" for s, e in zip(HERMITIAN_SIGMAS, sweep))
    sym, deriv = t_identity_residuals()
    e = L.hermitian_elements_b1(-0.3, 0.8)
    zeros = max(abs(e.g_complex), abs(e.w_rc), abs(e.w_cc))
    out = [
        _result("hermitian", "airy_square_integral", diag, 1e-8),
        _result("hermitian", "airy_kernel_integral", off, 1e-8),
        CheckResult("hermitian", "b2_sigma_sweep_monotone", float(not monotone), 0.0, monotone, table),
        _result("hermitian", "b2_reduction_sigma_0.05", sweep[-1], 0.01),
        _result("hermitian", "b4_ridge_density_sigma_0.05", hermitian_b4_residual(), 0.01),
        _result("hermitian", "b1_real_density_sigma_0.05", hermitian_b1_residual(), 0.01),
        _result("hermitian", "T2_T3_swap", sym, 1e-6),
        _result("hermitian", "T4_is_dT2_dX2", deriv, 1e-6),
        _result("hermitian", "b1_complex_elements_zero", zeros, 0.0),
    ]
    return out


# ---------------------------------------------------------------------------
# sigma -> infinity


STRONG_SIGMAS = (3.0, 6.0, 12.0)
STRONG_PAIRS = ((0.3 + 0.2j, -0.3 + 0.2j), (0.3 - 0.2j, 0.3 + 0.2j),
                (-0.3 + 0.2j, 0.3 - 0.2j), (0.2 + 0.5j, -0.1 - 0.4j))
UNIVERSALITY_X = (-1.0, -0.5, 0.0, 0.3, 1.0)


def strong_errors(sigma, pairs=STRONG_PAIRS):
    """Relative errors of the rescaled interpolating kernels against the erfc forms."""
    s = sigma
    err = {}
    err["b2"] = max(_rel(2 * s * s * L.kernel_ai_b2(s * a, s * b, s), L.strong_edge_kernel_b2(a, b))
                    for a, b in pairs)
    err["b4"] = max(_rel(2 * s * s * L.kernel_ai_b4(s * a, s * b, s), L.strong_edge_kernel_b4(a, b))
                    for a, b in pairs)
    el = [L.strong_edge_elements_b1(a, b) for a, b in pairs]
    err["b1_khat"] = max(_rel(2 * s * s * L.prekernel_ai_b1(s * a, s * b, s), e.khat)
                         for (a, b), e in zip(pairs, el))
    err["b1_g_real"] = max(_rel(2 * s * L.g_ai_real_b1(s * a, s * b.real, s), e.g_real)
                           for (a, b), e in zip(pairs, el))
    err["b1_w_rr"] = max(_rel(2 * L.w_ai_rr_b1(s * a.real, s * b.real, s), e.w_rr)
                         for (a, b), e in zip(pairs, el) if a.real != b.real)
    return err


def universality_error(Y=5.0, xs=UNIVERSALITY_X):
    """beta = 4 vs beta = 2 strong kernels on conjugate pairs at large |Yhat|."""
    worst = 0.0
    for X in xs:
        a, b = complex(X, Y), complex(X, -Y)
        k4 = L.strong_edge_kernel_b4(a, b)
        k2 = L.strong_edge_kernel_b2(a, b)
        worst = max(worst, abs(k4 * 4 * Y / (2 * Y) - k2) / abs(k2))
    return worst


def suite_strong():
    table = {s: strong_errors(s) for s in STRONG_SIGMAS}
    out = []
    for key in table[STRONG_SIGMAS[0]]:
        errs = [table[s][key] for s in STRONG_SIGMAS]
        monotone = all(b < a for a, b in zip(errs, errs[1:]))
        detail = " ".join(f"{s:g}:{e:.2e}" for s, e in zip(STRONG_SIGMAS, errs))
        out.append(CheckResult("strong", f"{key}_monotone", float(not monotone), 0.0, monotone, detail))
        out.append(_result("strong", f"{key}_sigma_12", errs[-1], 0.02, detail))
    out.append(_result("strong", "b4_universality_Y5", universality_error(), 0.05))
    return out


# ---------------------------------------------------------------------------
# bulk and Poisson


def suite_bulk():
    from scipy.special import erf

    diag = max(_rel(L.bulk_sine_kernel(x, x, s).real, erf(s) / (2 * math.pi * s * s))
               for s in (0.5, 1.0, 2.0) for x in (0.0, 1.3))
    s = 1e-3
    sine = max(_rel(s * math.sqrt(math.pi) * L.bulk_sine_kernel(0.0, d, s).real,
                    math.sin(d) / (math.pi * d)) for d in (0.5, 1.0, 2.5, 4.0))
    z1, z2 = 0.3 + 0.4j, -0.8 - 0.1j
    sym = abs(L.bulk_sine_kernel(z1, z2, 1.0) - L.bulk_sine_kernel(z2, z1, 1.0))
    return [
        _result("bulk", "diagonal_erf_form", diag, 1e-10),
        _result("bulk", "sine_kernel_sigma_1e-3", sine, 1e-5),
        _result("bulk", "symmetry", sym, 1e-14),
    ]


def suite_poisson():
    off = max(abs(L.poisson_kernel(b, 0.2 + 0.5j, -0.1 + 0.3j)) for b in (1, 2, 4))
    z1, z2 = 0.4 + 0.7j, 0.1 - 0.7j
    m2 = L.poisson_kernel(2, z1, z2)
    ratio4 = abs(L.poisson_kernel(4, z1, z2) / m2 - 0.5)
    ratio1 = abs(L.poisson_kernel(1, z1, z2) / m2 - 0.5j)
    x, w = leggauss(60)
    ys, ws = 8 * x, 8 * w
    marg = sum(wi * L.poisson_kernel(2, complex(0.5, y), complex(0.5, -y)).real for y, wi in zip(ys, ws))
    return [
        CheckResult("poisson", "off_conjugate_zero", off, 0.0, off == 0.0, "y1 != -y2"),
        _result("poisson", "b4_half_of_b2", ratio4, 1e-15),
        _result("poisson", "b1_phase", ratio1, 1e-15),
        _result("poisson", "b2_marginal_exp", _rel(marg, math.exp(-0.5)), 1e-12),
    ]


# ---------------------------------------------------------------------------
# finite N -> limit and correlation plumbing


CONVERGENCE_NS = (50, 100, 200)
CONVERGENCE_PAIRS = ((-1 + 0.3j, -0.5 - 0.2j), (0.2 + 0.5j, 0.4 + 0.1j), (-2 + 0.1j, -1.5 + 0.4j),
                     (0.5 - 0.3j, 0.1 + 0.6j), (-0.7 + 0j, 0.3 + 0.2j))


def convergence_errors(sigma=1.0, ns=CONVERGENCE_NS, pairs=CONVERGENCE_PAIRS):
    """Worst relative gap between the scaled finite-N beta = 2 kernel and its limit, per N."""
    out = []
    for n in ns:
        spec = F.EnsembleSpec.weak(2, n, sigma)
        worst = 0.0
        for a, b in pairs:
            phase = np.exp(-1j * n ** (1 / 3) * (a.imag + b.imag))
            fin = n ** (-1 / 3) * phase * F.kernel_b2(spec.edge_point(a), spec.edge_point(b), spec)
            lim = L.kernel_ai_b2(a, b, sigma)
            worst = max(worst, abs(fin - lim) / abs(lim))
        out.append(worst)
    return out


def suite_convergence():
    errs = convergence_errors()
    monotone = all(b < a for a, b in zip(errs, errs[1:]))
    detail = " ".join(f"{n}:{e:.3f}" for n, e in zip(CONVERGENCE_NS, errs))
    return [
        CheckResult("convergence", "b2_monotone", float(not monotone), 0.0, monotone, detail),
        _result("convergence", "b2_N200", errs[-1], 0.05, detail),
    ]


def pfaffian_residual(trials=40, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(trials):
        dim = 2 * (1 + k % 6)
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        a = a - a.T
        pf, det = pfaffian(a), np.linalg.det(a)
        worst = max(worst, abs(pf * pf - det) / max(abs(det), 1e-300))
    return worst


def phase_invariance_residual(seed=0):
    """R_2 under conjugation of either argument (beta = 4) and the beta = 2 gauge phase."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    spec4 = F.EnsembleSpec(4, 8, 0.4)
    spec2 = F.EnsembleSpec(2, 8, 0.4)
    for _ in range(5):
        z = rng.uniform(-2, 2, 2) + 1j * rng.uniform(0.1, 1.5, 2)
        base = F.correlations(z, spec4)
        for alt in ([z[0].conjugate(), z[1]], [z[0], z[1].conjugate()]):
            worst = max(worst, _rel(F.correlations(alt, spec4), base))
        # det K(z_i, z_j*) is unchanged by K -> e^{i(t_i - t_j)} K
        k = F.kernel_b2(z[:, None], np.conj(z)[None, :], spec2)
        t = rng.uniform(0, 2 * math.pi, 2)
        ph = np.exp(1j * (t[:, None] - t[None, :]))
        worst = max(worst, _rel(np.linalg.det(k * ph).real, np.linalg.det(k).real))
    return worst


def suite_plumbing():
    return [
        _result("plumbing", "pfaffian_squared_det", pfaffian_residual(), 1e-10),
        _result("plumbing", "r2_phase_invariance", phase_invariance_residual(), 1e-12),
    ]


_SUITES = {
    "identities": suite_identities,
    "hermitian": suite_hermitian,
    "strong": suite_strong,
    "bulk": suite_bulk,
    "poisson": suite_poisson,
    "convergence": suite_convergence,
    "plumbing": suite_plumbing,
}


def run_suite(name):
    if name == "all":
        return [r for key in SUITES for r in _SUITES[key]()]
    if name not in _SUITES:
        raise UsageError(f"unknown suite {name!r}; expected one of {SUITES + ('all',)}")
    return _SUITES[name]()
