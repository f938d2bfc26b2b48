"""Quadrature for semi-infinite integrals of exponentially weighted Airy products.

Every interpolating edge kernel is an integral over [0, inf) of products of
deformed Airy functions

    Aid(Z + t) = exp(sigma^6/12 + sigma^2 (Z+t)/2) Ai(Z + t + sigma^4/4),

optionally nested.  The integrands are evaluated in log space (scipy's
exponentially scaled ``airye`` plus a cancellation-free exponent), so the
integrals come back as ``Scaled(value, log_scale)`` pairs and never
overflow, even though the individual factors do for sigma of order 10.

Tolerances in :class:`QuadratureSpec` apply to the scaled integrand, whose
peak modulus on the integration range is 1.
"""

from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial import legendre

from .errors import ConvergenceError, DomainError
from .specfun import log_deformed_airy

MAX_TRUNCATION = 1.0e4
_NODES_LOW = 10
_NODES_HIGH = 20


def _default_rel_tol():
    raw = os.environ.get("GEK_QUAD_RTOL")
    if raw is None:
        return 1e-10
    try:
        value = float(raw)
    except ValueError as exc:
        raise DomainError(f"GEK_QUAD_RTOL must be a float, got {raw!r}") from exc
    if not value > 0:
        raise DomainError(f"GEK_QUAD_RTOL must be positive, got {raw!r}")
    return value


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and limits for the adaptive Gauss-Legendre engine.

    ``truncation_point`` fixes the cutoff T of [0, inf); left as None the
    cutoff is chosen so that the analytic tail bound is below abs_tol/10.
    """

    rel_tol: float = field(default_factory=_default_rel_tol)
    abs_tol: float = 1e-12
    max_panels: int = 4000
    truncation_point: float | None = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("rel_tol and abs_tol must be positive")
        if self.max_panels < 4:
            raise DomainError("max_panels must be at least 4")
        if self.truncation_point is not None and not self.truncation_point > 0:
            raise DomainError("truncation_point must be positive")

    def tolerance(self, value):
        return max(self.abs_tol, self.rel_tol * float(np.max(np.abs(value))))


class Scaled(NamedTuple):
    """An integral stored as value * exp(log_scale)."""

    value: complex
    log_scale: complex

    def resolve(self):
        return complex(self.value * np.exp(self.log_scale))


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Nodes and weights of the n-point rule on [-1, 1]."""
    x, w = legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def integration_matrix(n):
    """S with (S f)_j = integral from -1 to x_j of the interpolant of f at the GL nodes."""
    x, _ = gauss_legendre(n)
    vander = legendre.legvander(x, n - 1)
    # column k: antiderivative of P_k that vanishes at -1, evaluated at the nodes
    anti = np.empty((n, n))
    for k in range(n):
        coef = np.zeros(n)
        coef[k] = 1.0
        anti[:, k] = legendre.legval(x, legendre.legint(coef, lbnd=-1.0))
    mat = anti @ np.linalg.inv(vander)
    mat.setflags(write=False)
    return mat


def _panel_rule(f, a, b, n):
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    fx = np.asarray(f(0.5 * (a + b) + half * x))
    return half * np.tensordot(w, fx, axes=(0, 0))


def adaptive_gl(f, a, b, spec=None, initial_panels=4):
    """Adaptive composite Gauss-Legendre on [a, b].

    ``f`` maps a 1-D array of abscissae to values whose leading axis runs
    over the abscissae (vector-valued integrands are allowed).  Each panel
    is scored by the gap between its 10- and 20-point rules; the worst
    panel is bisected until the summed gaps meet the tolerance.

    Returns (value, error_estimate).
    """
    spec = spec or QuadratureSpec()
    if not (np.isfinite(a) and np.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if a == b:
        zero = _panel_rule(f, a, a + 1.0, 1) * 0.0
        return zero, 0.0
    edges = np.linspace(a, b, max(1, initial_panels) + 1)
    heap = []
    counter = 0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        hi_val = _panel_rule(f, lo, hi, _NODES_HIGH)
        err = float(np.max(np.abs(hi_val - _panel_rule(f, lo, hi, _NODES_LOW))))
        heapq.heappush(heap, (-err, counter, lo, hi, hi_val))
        counter += 1
        total_err += err
    min_width = 1e-13 * abs(b - a)
    while True:
        total = sum(item[4] for item in heap)
        if total_err <= spec.tolerance(total):
            return total, total_err
        if len(heap) >= spec.max_panels:
            raise ConvergenceError(
                f"adaptive quadrature on [{a}, {b}] used {len(heap)} panels; "
                f"error estimate {total_err:.3e} above tolerance {spec.tolerance(total):.3e}")
        neg_err, _, lo, hi, _ = heapq.heappop(heap)
        total_err += neg_err
        mid = 0.5 * (lo + hi)
        if hi - lo < min_width:
            raise ConvergenceError(f"panel width underflow near t={mid:.6g}")
        for p, q in ((lo, mid), (mid, hi)):
            hi_val = _panel_rule(f, p, q, _NODES_HIGH)
            err = float(np.max(np.abs(hi_val - _panel_rule(f, p, q, _NODES_LOW))))
            heapq.heappush(heap, (-err, counter, p, q, hi_val))
            counter += 1
            total_err += err


def integrate(f, a, b, spec=None):
    """Integral of ``f`` over the finite interval [a, b]."""
    value, _ = adaptive_gl(f, a, b, spec)
    return value


def semiinfinite_integral(f, spec=None, tail_bound: Callable[[float], float] | None = None):
    """Integral of ``f`` over [0, inf).

    With ``tail_bound`` (a function T -> bound on the integral over
    [T, inf)) the cutoff doubles until the bound is below abs_tol/10.
    Without it, the cutoff doubles until the contribution of [T, 2T] is
    below that level, which is a heuristic rather than a certificate.
    """
    spec = spec or QuadratureSpec()
    target = spec.abs_tol / 10.0
    if spec.truncation_point is not None:
        T = spec.truncation_point
        if tail_bound is not None and tail_bound(T) > target:
            raise ConvergenceError(f"tail bound {tail_bound(T):.3e} at T={T} exceeds {target:.3e}")
        return integrate(f, 0.0, T, spec)
    T = 8.0
    if tail_bound is not None:
        while tail_bound(T) > target:
            T *= 2.0
            if T > MAX_TRUNCATION:
                raise ConvergenceError("tail bound not satisfiable below the maximum truncation")
        return integrate(f, 0.0, T, spec)
    total = integrate(f, 0.0, T, spec)
    while True:
        piece = integrate(f, T, 2.0 * T, spec)
        total = total + piece
        T *= 2.0
        if np.max(np.abs(piece)) <= max(target, spec.rel_tol * np.max(np.abs(total))):
            return total
        if T > MAX_TRUNCATION:
            raise ConvergenceError("integrand does not decay before the maximum truncation")


# ---------------------------------------------------------------------------
# deformed Airy integrands


class _AidFactor:
    """t -> exp(offset t) Aid(Z + t, sigma), evaluated in log form."""

    def __init__(self, Z, sigma, offset):
        self.Z = complex(Z)
        self.sigma = float(sigma)
        self.offset = float(offset)
        self.w = self.Z + self.sigma**4 / 4.0

    def log_parts(self, t):
        eai, expo = log_deformed_airy(self.Z + np.asarray(t, dtype=float), self.sigma)
        return eai, expo + self.offset * np.asarray(t, dtype=float)

    def log_abs(self, t):
        eai, expo = self.log_parts(t)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(eai)) + np.real(expo)

    def decay_rate(self, t):
        """Lower bound on -d/dt log|factor| for large Re(w + t)."""
        return -(self.offset + self.sigma**2 / 2.0 - np.sqrt(self.w + t).real)


def _product_integrand(factors, log_scale):
    def f(t):
        t = np.asarray(t, dtype=float)
        mant = np.ones(t.shape, dtype=complex)
        expo = np.zeros(t.shape, dtype=complex)
        for fac in factors:
            e, x = fac.log_parts(t)
            mant = mant * e
            expo = expo + x
        return mant * np.exp(expo - log_scale)
    return f


def _choose_cutoff(factors, spec, threshold):
    """Cutoff T and log scale for the product of ``factors``.

    The tail beyond T is bounded by 2 |f(T)| / kappa(T) where kappa is the
    summed decay rate; this needs Re(w + T) >= 2 for every factor so the
    large-argument Airy form applies, and kappa(T) > 0.
    """
    min_re_w = min(f.w.real for f in factors)
    T = max(4.0, 2.0 - min_re_w)
    if spec.truncation_point is not None:
        T = spec.truncation_point
    while True:
        grid = np.linspace(0.0, T, 257)
        logabs = sum(f.log_abs(grid) for f in factors)
        log_scale = float(np.max(logabs[np.isfinite(logabs)])) if np.any(np.isfinite(logabs)) else 0.0
        kappa = sum(f.decay_rate(T) for f in factors)
        ok_region = all((f.w + T).real >= 2.0 for f in factors)
        if ok_region and kappa > 0:
            log_bound = logabs[-1] - log_scale + math.log(2.0 / kappa)
            if log_bound <= math.log(threshold):
                return T, log_scale, math.exp(log_bound)
        if spec.truncation_point is not None:
            raise ConvergenceError(
                f"tail bound at the fixed truncation point T={T} exceeds {threshold:.3e}")
        T *= 1.25
        if T > MAX_TRUNCATION:
            raise ConvergenceError("no certified truncation point below the maximum")


def _initial_panels(T):
    return max(4, int(math.ceil(T / 2.0)))


def aid_product_integral(Z1, Z2, sigma, offset=0.0, spec=None):
    """Integral over [0, inf) of exp(offset t) Aid(Z1+t) Aid(Z2+t), as :class:`Scaled`."""
    spec = spec or QuadratureSpec()
    factors = [_AidFactor(Z1, sigma, offset / 2.0), _AidFactor(Z2, sigma, offset / 2.0)]
    T, log_scale, _ = _choose_cutoff(factors, spec, spec.abs_tol / 10.0)
    f = _product_integrand(factors, log_scale)
    value, _ = adaptive_gl(f, 0.0, T, spec, initial_panels=_initial_panels(T))
    return Scaled(complex(value), log_scale)


def aid_integral(Z, sigma, offset=0.0, spec=None):
    """Integral over [0, inf) of exp(offset t) Aid(Z+t), as :class:`Scaled`."""
    spec = spec or QuadratureSpec()
    factors = [_AidFactor(Z, sigma, offset)]
    T, log_scale, _ = _choose_cutoff(factors, spec, spec.abs_tol / 10.0)
    f = _product_integrand(factors, log_scale)
    value, _ = adaptive_gl(f, 0.0, T, spec, initial_panels=_initial_panels(T))
    return Scaled(complex(value), log_scale)


def _nested_on_grid(f_inner, f_outer, edges, n=_NODES_HIGH):
    x, w = gauss_legendre(n)
    smat = integration_matrix(n)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (lo + hi))[:, None] + half[:, None] * x[None, :]
    flat = nodes.ravel()
    gi = f_inner(flat).reshape(nodes.shape)
    go = f_outer(flat).reshape(nodes.shape)
    panel_inner = half * (gi @ w)
    start = np.concatenate(([0.0], np.cumsum(panel_inner)[:-1]))
    inner_at_nodes = start[:, None] + half[:, None] * (gi @ smat.T)
    return complex(np.sum(half * ((go * inner_at_nodes) @ w)))


def aid_nested_integral(Z1, Z2, sigma, offset=0.0, spec=None):
    """Ordered double integral, as :class:`Scaled`:

        int_0^inf ds e^{offset s} Aid(Z2+s) int_0^s dt e^{offset t} Aid(Z1+t).

    The inner integral is accumulated on the same panel grid as the outer
    one through a spectral integration matrix.  The grid is refined by
    global bisection until two successive results agree.
    """
    spec = spec or QuadratureSpec()
    inner = _AidFactor(Z1, sigma, offset)
    outer = _AidFactor(Z2, sigma, offset)
    T1, _, _ = _choose_cutoff([inner], spec, spec.abs_tol / 10.0)
    # with unit peak, |inner integral| <= T1 + (its tail) < T1 + 1, and the
    # outer tail is bounded by that times the tail of |outer|
    T2, _, _ = _choose_cutoff([outer], spec, spec.abs_tol / (10.0 * (T1 + 1.0)))
    T = max(T1, T2)
    grid = np.linspace(0.0, T, 513)
    log_in = float(np.max(inner.log_abs(grid)))
    log_out = float(np.max(outer.log_abs(grid)))
    f_in = _product_integrand([inner], log_in)
    f_out = _product_integrand([outer], log_out)
    edges = np.linspace(0.0, T, _initial_panels(T) + 1)
    value = _nested_on_grid(f_in, f_out, edges)
    while True:
        finer = np.sort(np.concatenate((edges, 0.5 * (edges[:-1] + edges[1:]))))
        new = _nested_on_grid(f_in, f_out, finer)
        if abs(new - value) <= spec.tolerance(new):
            return Scaled(new, log_in + log_out)
        if len(finer) - 1 > spec.max_panels:
            raise ConvergenceError(
                f"nested quadrature did not settle: change {abs(new - value):.3e} "
                f"with {len(finer) - 1} panels")
        edges, value = finer, new


# ---------------------------------------------------------------------------
# public surfaces in the shift/rate parametrisation


def _sigma_from_shift(shift):
    if shift < 0:
        raise DomainError(f"shift must be nonnegative, got {shift!r}")
    return (4.0 * shift) ** 0.25


def exp_airy_product_integral(Z1, Z2, shift, rate, spec=None):
    """int_0^inf dt e^{rate t} Ai(Z1 + shift + t) Ai(Z2 + shift + t).

    Raises :class:`~gek.errors.RangeError` only if the final value itself
    does not fit in double precision; use :func:`aid_product_integral`
    for the scaled form.
    """
    sigma = _sigma_from_shift(shift)
    res = aid_product_integral(Z1, Z2, sigma, rate - sigma**2, spec)
    correction = -sigma**6 / 6.0 - sigma**2 * (complex(Z1) + complex(Z2)) / 2.0
    return _resolve(Scaled(res.value, res.log_scale + correction))


def nested_exp_airy_integral(Z1, Z2, shift, rate, spec=None):
    """int_0^inf ds e^{rate s} Ai(Z2+shift+s) int_0^s dt e^{rate t} Ai(Z1+shift+t)."""
    sigma = _sigma_from_shift(shift)
    res = aid_nested_integral(Z1, Z2, sigma, rate - sigma**2 / 2.0, spec)
    correction = -sigma**6 / 6.0 - sigma**2 * (complex(Z1) + complex(Z2)) / 2.0
    return _resolve(Scaled(res.value, res.log_scale + correction))


def cumulative_exp_airy_integral(Z, shift, rate, s, spec=None):
    """int_0^s dt e^{rate t} Ai(Z + shift + t) for each upper limit in ``s``."""
    from .specfun import airy_ai

    spec = spec or QuadratureSpec()
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty(s.shape, dtype=complex)
    for k, upper in enumerate(s):
        out[k] = integrate(lambda t: np.exp(rate * t) * airy_ai(complex(Z) + shift + t),
                           0.0, upper, spec)
    return out


def _resolve(scaled):
    from .errors import RangeError

    if scaled.value == 0:
        return 0j
    log_mag = math.log(abs(scaled.value)) + float(np.real(scaled.log_scale))
    if log_mag > 709.0:
        raise RangeError(f"integral magnitude exp({log_mag:.1f}) overflows")
    return scaled.resolve()
