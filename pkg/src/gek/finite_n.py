"""Finite-N kernels of the elliptic Ginibre ensembles.

All Hermite sums are written in terms of the monic polynomials

    p_j(z) = (tau/2)^{j/2} H_j(z / sqrt(2 tau)),    p_{j+1} = z p_j - j tau p_{j-1},

whose recurrence stays valid at tau = 0.  For every evaluation point the
sequence p_j(z)/sqrt(j!) is stored as a mantissa vector times exp(M(z)),
with M(z) its largest log-magnitude, so bilinear sums never overflow and
the weights are applied in log space before exponentiating.

The size ``n`` of :class:`EnsembleSpec` counts complex eigenvalues.  For
beta = 4 that is twice the quaternion dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError, RangeError
from .specfun import log_double_factorial, log_erfc, pfaffian

MAX_N = 4096
MAX_J = 2000
MAX_POINTS = 4


@dataclass(frozen=True)
class EnsembleSpec:
    """Symmetry class, number of complex eigenvalues and non-Hermiticity."""

    beta: int
    n: int
    tau: float

    def __post_init__(self):
        if self.beta not in (1, 2, 4):
            raise DomainError(f"beta must be 1, 2 or 4, got {self.beta!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if self.n > MAX_N:
            raise DomainError(f"n must not exceed {MAX_N}")
        if self.beta in (1, 4) and self.n % 2:
            raise DomainError(f"beta={self.beta} needs even n, got {self.n}")
        if not (0.0 <= self.tau < 1.0):
            raise DomainError(f"tau must lie in [0, 1), got {self.tau!r}")

    @classmethod
    def weak(cls, beta, n, sigma):
        """Spec with tau = 1 - sigma^2 / n^{1/3}."""
        return cls(beta, n, 1.0 - sigma**2 / n ** (1.0 / 3.0))

    def edge_point(self, Z):
        """z = (1+tau) sqrt(n) + Z n^{-1/6}."""
        return (1.0 + self.tau) * math.sqrt(self.n) + np.asarray(Z) * self.n ** (-1.0 / 6.0)


@dataclass
class MatrixKernelBlocks:
    """One 2x2 block (khat, -g; g_swapped, -w) of a Pfaffian matrix-kernel.

    ``real_axis[i]`` marks an argument on the real line; entries involving
    it carry a delta(y_i) that is part of the measure and is never folded
    into the numbers.  ``weighted`` records whether the gauge
    diag(w(z), 1/w(z)) (which leaves every Pfaffian unchanged) was applied.
    """

    khat: complex
    g: complex
    g_swapped: complex
    w: complex
    regime: str = "finite"
    real_axis: tuple = (False, False)
    weighted: bool = False
    parts: dict = field(default_factory=dict)

    def block(self):
        return np.array([[self.khat, -self.g], [self.g_swapped, -self.w]], dtype=complex)


# ---------------------------------------------------------------------------
# weights


def log_weight(beta, z, tau):
    if not (0.0 <= tau < 1.0):
        raise DomainError(f"tau must lie in [0, 1), got {tau!r}")
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    if beta in (2, 4):
        return -x * x / (1.0 + tau) - y * y / (1.0 - tau)
    if beta == 1:
        arg = math.sqrt(2.0 / (1.0 - tau * tau)) * np.abs(y)
        return (-x * x + y * y) / (2.0 * (1.0 + tau)) + 0.5 * log_erfc(arg)
    raise DomainError(f"beta must be 1, 2 or 4, got {beta!r}")


def weight(beta, z, tau):
    """Weight function w^(beta)(z); the beta = 1 weight includes the erfc factor."""
    out = np.exp(log_weight(beta, z, tau))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# polynomial tables


@dataclass
class _Table:
    """a[j] = p_j(z) / sqrt(j!) * exp(-M(z)) for j = 0..nmax, points along axis 1."""

    a: np.ndarray
    M: np.ndarray


def _monic_table(nmax, z, tau):
    """Normalised monic table, see :class:`_Table`."""
    z = np.asarray(z, dtype=complex).ravel()
    logs = np.zeros((nmax + 1, z.size))
    mant = np.empty((nmax + 1, z.size), dtype=complex)
    prev = np.ones(z.size, dtype=complex)
    mant[0] = prev
    shift = np.zeros(z.size)
    if nmax >= 1:
        cur = z.copy()
        mant[1] = cur
        for j in range(1, nmax):
            # normalised form of p_{j+1} = z p_j - j tau p_{j-1}, divided by sqrt((j+1)!)
            # is applied at the end; here only the raw recurrence with rescaling
            prev, cur = cur, z * cur - j * tau * prev
            mant[j + 1] = cur
            logs[j + 1] = shift
            size = np.maximum(np.abs(cur), np.abs(prev))
            big = (size > 1e150) | ((size > 0) & (size < 1e-150))
            if np.any(big):
                factor = np.where(big, size, 1.0)
                prev = prev / factor
                cur = cur / factor
                shift = shift + np.log(factor)
    half_logfact = 0.5 * special.gammaln(np.arange(nmax + 1) + 1.0)[:, None]
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(mant)) + logs - half_logfact
    M = np.max(np.where(np.isfinite(logmag), logmag, -np.inf), axis=0)
    M = np.where(np.isfinite(M), M, 0.0)
    a = mant * np.exp(logs - half_logfact - M[None, :])
    return _Table(a, M)


def _pair_tables(nmax, z1, z2, tau):
    z1, z2 = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))
    shape = z1.shape
    tab = _monic_table(nmax, np.concatenate([z1.ravel(), z2.ravel()]), tau)
    m = z1.size
    t1 = _Table(tab.a[:, :m], tab.M[:m])
    t2 = _Table(tab.a[:, m:], tab.M[m:])
    return t1, t2, shape


def _finish(mant, log_factor, shape):
    """mant * exp(log_factor), with overflow reported as RangeError."""
    mant = np.asarray(mant, dtype=complex)
    log_factor = np.asarray(log_factor, dtype=float)
    with np.errstate(divide="ignore"):
        total = np.log(np.abs(mant)) + log_factor
    if np.any((total > 709.0) & (mant != 0)):
        raise RangeError(f"result exp({np.max(total):.1f}) overflows double precision")
    out = np.where(mant == 0, 0j, mant * np.exp(np.minimum(log_factor, 709.0)))
    out = out.reshape(shape)
    return complex(out) if out.ndim == 0 else out


def _dfact_ratio(nmax):
    """sqrt(j!) / j!! for j = 0..nmax."""
    j = np.arange(nmax + 1)
    return np.exp(0.5 * special.gammaln(j + 1.0) - log_double_factorial(j))


# ---------------------------------------------------------------------------
# bilinear sums (mantissa parts; the scale exp(M1 + M2) is applied by callers)


def _sum_b2(t1, t2, n):
    return np.sum(t1.a[:n] * t2.a[:n], axis=0)


def _sum_b1(t1, t2, n):
    # sum_{j<=n-2} (1/j!) [p_{j+1}(z1) p_j(z2) - p_j(z1) p_{j+1}(z2)]
    root = np.sqrt(np.arange(1, n))[:, None]
    return np.sum(root * (t1.a[1:n] * t2.a[:n - 1] - t1.a[:n - 1] * t2.a[1:n]), axis=0)


def _sum_b4(t1, t2, n):
    # sum over odd k <= n-1 of alpha_k(z1) A_{<k}(z2) - (1 <-> 2), alpha_j = p_j / j!!
    c = _dfact_ratio(n)[:, None]
    al1 = t1.a[:n] * c[:n]
    al2 = t2.a[:n] * c[:n]
    cum1 = np.cumsum(al1[0::2], axis=0)
    cum2 = np.cumsum(al2[0::2], axis=0)
    return np.sum(al1[1::2] * cum2 - al2[1::2] * cum1, axis=0)


def _check(spec, beta):
    if spec.beta != beta:
        raise DomainError(f"operation needs beta={beta}, spec has beta={spec.beta}")


def prekernel_b2(z1, z2, spec):
    """Unweighted sum  sum_{j<N} p_j(z1) p_j(z2) / c_j  with c_j = pi j! sqrt(1-tau^2)."""
    t1, t2, shape = _pair_tables(spec.n - 1, z1, z2, spec.tau)
    s = _sum_b2(t1, t2, spec.n) / (math.pi * math.sqrt(1.0 - spec.tau**2))
    return _finish(s, t1.M + t2.M, shape)


def kernel_b2(z1, z2, spec):
    """K_N(z1, z2) = sqrt(w(z1) w(z2)) * prekernel; the density is K_N(z, z*)."""
    _check(spec, 2)
    t1, t2, shape = _pair_tables(spec.n - 1, z1, z2, spec.tau)
    s = _sum_b2(t1, t2, spec.n) / (math.pi * math.sqrt(1.0 - spec.tau**2))
    z1b, z2b = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))
    logw = 0.5 * (log_weight(2, z1b, spec.tau) + log_weight(2, z2b, spec.tau)).ravel()
    return _finish(s, t1.M + t2.M + logw, shape)


_C4 = lambda tau: 1.0 / (2.0 * math.pi * (1.0 - tau) ** 1.5 * math.sqrt(1.0 + tau))


def prekernel_b4(z1, z2, spec):
    """Antisymmetric pre-kernel for beta = 4 (``spec.n`` complex eigenvalues)."""
    _check(spec, 4)
    t1, t2, shape = _pair_tables(spec.n - 1, z1, z2, spec.tau)
    s = _sum_b4(t1, t2, spec.n) * _C4(spec.tau)
    return _finish(s, t1.M + t2.M, shape)


def _kernel_b4_log(z1, z2, spec):
    t1, t2, shape = _pair_tables(spec.n - 1, z1, z2, spec.tau)
    s = _sum_b4(t1, t2, spec.n) * _C4(spec.tau)
    z1b, z2b = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))
    y1, y2 = z1b.imag.ravel(), z2b.imag.ravel()
    pref = -2j * np.sign(y1) * np.sqrt(np.abs(y1 * y2))
    logw = 0.5 * (log_weight(4, z1b, spec.tau) + log_weight(4, z2b, spec.tau)).ravel()
    return s * pref, t1.M + t2.M + logw, shape


def kernel_b4(z1, z2, spec):
    """(-2i) sgn(y1) sqrt(|y1 y2| w(z1) w(z2)) K^_N(z1, z2).

    Pass z2 already conjugated: the density is kernel_b4(z, z*).  The
    sgn(y1) factor makes the density formula valid in both half planes.
    """
    _check(spec, 4)
    return _finish(*_kernel_b4_log(z1, z2, spec))


def prekernel_b1(z1, z2, spec):
    """Antisymmetric pre-kernel for beta = 1, even N."""
    _check(spec, 1)
    t1, t2, shape = _pair_tables(spec.n - 1, z1, z2, spec.tau)
    s = _sum_b1(t1, t2, spec.n) / (2.0 * math.sqrt(2.0 * math.pi) * (1.0 + spec.tau))
    return _finish(s, t1.M + t2.M, shape)


def _weighted_prekernel_b1(z1, z2, spec, log_extra=0.0):
    """w(z1) w(z2) K^_N(z1, z2) exp(log_extra), never forming the bare pre-kernel."""
    t1, t2, shape = _pair_tables(spec.n - 1, z1, z2, spec.tau)
    s = _sum_b1(t1, t2, spec.n) / (2.0 * math.sqrt(2.0 * math.pi) * (1.0 + spec.tau))
    z1b, z2b = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))
    logw = (log_weight(1, z1b, spec.tau) + log_weight(1, z2b, spec.tau)).ravel()
    return _finish(s, t1.M + t2.M + logw + np.ravel(log_extra), shape)


def identity_b1_b2_residual(z1, z2, spec):
    """Relative residual of the exact pre-kernel relation

        2 sqrt(2 pi) (1 - tau^2) K^1_N = pi sqrt(1-tau^2) (z1 - z2) K^2_{N-1}
            - 2/(N-2)! (tau/2)^{N-1/2} [H_{N-1}(u1) H_{N-2}(u2) - (1 <-> 2)],

    evaluated in scaled form so that large N and |z| are allowed.  The
    residual is relative to the largest side or, where the sums cancel
    (z1 near z2), to the summed magnitudes of their terms.
    """
    _check(spec, 1)
    n, tau = spec.n, spec.tau
    t1, t2, shape = _pair_tables(n - 1, z1, z2, tau)
    z1b, z2b = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))
    lhs = 2.0 * math.sqrt(2.0 * math.pi) * (1.0 - tau * tau) * (
        _sum_b1(t1, t2, n) / (2.0 * math.sqrt(2.0 * math.pi) * (1.0 + tau)))
    k2 = np.sum(t1.a[:n - 1] * t2.a[:n - 1], axis=0) / (math.pi * math.sqrt(1.0 - tau * tau))
    rhs1 = math.pi * math.sqrt(1.0 - tau * tau) * (z1b - z2b).ravel() * k2
    # (tau/2)^{N-1/2} H_{N-1} H_{N-2} = tau p_{N-1} p_{N-2}, and p_j = a_j sqrt(j!)
    coef = tau * math.exp(0.5 * (special.gammaln(n) + special.gammaln(n - 1)) - special.gammaln(n - 1))
    rhs2 = coef * (t1.a[n - 1] * t2.a[n - 2] - t1.a[n - 2] * t2.a[n - 1])
    resid = np.abs(lhs - (rhs1 - rhs2))
    # size of the individual terms before they cancel (e.g. at z1 = z2)
    root = np.sqrt(np.arange(1, n))[:, None]
    terms = (1.0 - tau) / (1.0 + tau) * np.sum(
        root * (np.abs(t1.a[1:n] * t2.a[:n - 1]) + np.abs(t1.a[:n - 1] * t2.a[1:n])), axis=0)
    terms = terms + np.abs(coef) * (np.abs(t1.a[n - 1] * t2.a[n - 2]) + np.abs(t1.a[n - 2] * t2.a[n - 1]))
    scale = np.maximum.reduce([np.abs(lhs), np.abs(rhs1), np.abs(rhs2), terms])
    out = np.where(scale > 0, resid / np.where(scale > 0, scale, 1.0), 0.0).reshape(shape)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# the integrals I_j(x; tau)


def _i0(x, tau):
    return math.sqrt(2.0 * math.pi * (1.0 + tau)) * special.erf(x / math.sqrt(2.0 * (1.0 + tau)))


def _j_table(x, tau, jmax):
    """J_j(x) = (tau/2)^{j/2} I_j(x; tau) = int sgn(x-t) w(t) p_j(t) dt for j <= jmax.

    Returned as (mant, log) arrays of shape (jmax+1, m) with J = mant * exp(log).
    """
    x = np.asarray(x, dtype=float).ravel()
    tab = _monic_table(jmax, x.astype(complex), tau)
    alpha = (tab.a * _dfact_ratio(jmax)[:, None]).real   # p_j / j!! times exp(-M)
    w1 = np.exp(-x * x / (2.0 * (1.0 + tau)))
    j = np.arange(jmax + 1)
    log = log_double_factorial(j - 1)[:, None] + tab.M[None, :]
    mant = np.empty((jmax + 1, x.size))
    even_cum = np.cumsum(alpha[0::2], axis=0)   # sum_{k<=K} p_{2k}/(2k)!!
    odd_cum = np.cumsum(alpha[1::2], axis=0)    # sum_{k<=K} p_{2k+1}/(2k+1)!!
    i0_scaled = _i0(x, tau) * np.exp(-tab.M)
    for jj in range(jmax + 1):
        if jj % 2:
            mant[jj] = -2.0 * (1.0 + tau) * w1 * even_cum[(jj - 1) // 2]
        elif jj == 0:
            mant[jj] = i0_scaled
        else:
            mant[jj] = i0_scaled - 2.0 * (1.0 + tau) * w1 * odd_cum[jj // 2 - 1]
    _use_odd_tail(mant, x, tau, jmax, tab.M, w1, i0_scaled)
    return mant, log


_TAIL_MAX_TERMS = 20000


def _use_odd_tail(mant, x, tau, jmax, M, w1, i0_scaled):
    """Replace cancelling even-j entries by the convergent tail of the odd series.

    Since I_0 = 2(1+tau) w(x) sum_{k>=0} p_{2k+1}/(2k+1)!!, the bracket
    I_0 - 2(1+tau) w sum_{k<j/2} equals 2(1+tau) w sum_{k>=j/2}, which has
    no cancellation.  Used only where the direct form loses over 3 digits.
    """
    if tau <= 0 or jmax < 2:
        return
    even = np.arange(2, jmax + 1, 2)
    bad = np.abs(mant[even]) < 1e-3 * np.abs(i0_scaled)[None, :]
    if not np.any(bad):
        return
    size = 2 * jmax + 64
    while size <= _TAIL_MAX_TERMS:
        ext = _monic_table(size, x.astype(complex), tau)
        alpha = (ext.a * _dfact_ratio(size)[:, None]).real * np.exp(ext.M - M)[None, :]
        odd = alpha[1::2]
        tail = np.cumsum(odd[::-1], axis=0)[::-1]      # tail[k] = sum_{k' >= k}
        target = np.abs(tail[even // 2])
        needed = np.where(bad, target, np.inf).min(axis=0)
        if np.all(np.max(np.abs(odd[-8:]), axis=0) <= 1e-17 * needed):
            fixed = 2.0 * (1.0 + tau) * w1[None, :] * tail[even // 2]
            mant[even] = np.where(bad, fixed, mant[even])
            return
        size *= 2


def i_j(x, tau, j):
    """I_j(x; tau) = int sgn(x - t) exp(-t^2 / 2(1+tau)) H_j(t / sqrt(2 tau)) dt."""
    if int(j) != j or j < 0 or j > MAX_J:
        raise DomainError(f"j must be an integer in [0, {MAX_J}], got {j!r}")
    if not (0.0 < tau < 1.0):
        raise DomainError(f"tau must lie in (0, 1), got {tau!r}")
    j = int(j)
    mant, log = _j_table(x, tau, j)
    out = _finish(mant[j], log[j] - 0.5 * j * math.log(tau / 2.0), np.shape(x))
    return out.real if isinstance(out, np.ndarray) else out.real


def i_j_recurrence_residual(x, tau, j):
    """Relative residual of I_j = sqrt(2 tau)(1+tau)/(j+1) H_{j+1}(x/sqrt(2 tau)) w(x)
    + tau/(2(j+1)) I_{j+2}, with I_j from the closed-form sums."""
    from .specfun import hermite_h

    x = float(x)
    lhs = i_j(x, tau, j)
    h = hermite_h(j + 1, x / math.sqrt(2.0 * tau)).value().real
    w1 = math.exp(-x * x / (2.0 * (1.0 + tau)))
    first = math.sqrt(2.0 * tau) * (1.0 + tau) / (j + 1) * h * w1
    second = tau / (2.0 * (j + 1)) * i_j(x, tau, j + 2)
    scale = max(abs(lhs), abs(first), abs(second))
    return abs(lhs - first - second) / scale if scale else 0.0


def i_j_quadrature(x, tau, j, digits=20):
    """I_j by direct quadrature of its definition (an independent route).

    Runs in mpmath at ``digits`` significant digits: in double precision the
    integrand's sign changes cancel to far below the size of its peaks.
    """
    import mpmath

    with mpmath.workdps(digits):
        x_, tau_ = mpmath.mpf(x), mpmath.mpf(tau)
        scale = mpmath.sqrt(2 * tau_)

        def f(t):
            u = t / scale
            prev, cur = mpmath.mpf(1), 2 * u
            if j == 0:
                cur = prev
            for k in range(1, j):
                prev, cur = cur, 2 * u * cur - 2 * k * prev
            return mpmath.exp(-t * t / (2 * (1 + tau_))) * cur

        left = mpmath.quad(f, [-mpmath.inf, min(x_, 0) - 5, min(x_, 0), x_], method="gauss-legendre")
        right = mpmath.quad(f, [x_, max(x_, 0), max(x_, 0) + 5, mpmath.inf], method="gauss-legendre")
        return float(left - right)



# ---------------------------------------------------------------------------
# beta = 1 matrix-kernel elements


def _b1_gr_parts(z1, x2, spec):
    """-G^R(z1, x2) in weighted form w(z1)/w(x2) * (-G^R) via the beta=2 kernel route."""
    n, tau = spec.n, spec.tau
    z1b, x2b = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(x2, dtype=float))
    shape = z1b.shape
    t1, t2, _ = _pair_tables(n, z1b, x2b.astype(complex), tau)
    k2 = _sum_b2(t1, t2, n) / (math.pi * math.sqrt(1.0 - tau * tau))
    jm, jl = _j_table(x2b, tau, n)
    # p_{N-1}(z1) J_N(x2) / (N-1)!  with p_{N-1} = a_{N-1} sqrt((N-1)!) e^{M1}
    second = t1.a[n - 1] * jm[n] / (2.0 * math.sqrt(2.0 * math.pi) * (1.0 + tau))
    second_log = t1.M + jl[n] - 0.5 * special.gammaln(n)
    first = math.sqrt(math.pi * (1.0 - tau * tau) / 2.0) * k2
    first_log = t1.M + t2.M
    return (first, first_log), (second, second_log), z1b.ravel(), x2b.ravel(), shape


def _combine(*pairs):
    logs = np.max(np.stack([np.where(m != 0, l, -np.inf) for m, l in pairs]), axis=0)
    logs = np.where(np.isfinite(logs), logs, 0.0)
    mant = sum(m * np.exp(l - logs) for m, l in pairs)
    return mant, logs


def g_real_b1(z1, x2, spec, method="kernel"):
    """G^R_N(z1, x2) for beta = 1.

    ``method="kernel"`` uses the exact relation to the beta = 2 kernel plus
    one boundary term; ``"sum"`` evaluates the defining single sum over
    p_{j+1} I_j - p_j I_{j+1}.  The two routes agree to rounding.
    """
    _check(spec, 1)
    if method == "kernel":
        (f, fl), (s, sl), z1f, x2f, shape = _b1_gr_parts(z1, x2, spec)
        lw2 = log_weight(1, x2f, spec.tau)
        mant, log = _combine((f, fl + 2.0 * lw2), (s, sl + lw2))
        return _finish(-mant, log, shape)
    if method == "sum":
        return _g_real_sum(z1, x2, spec, weighted=False)
    raise DomainError(f"unknown method {method!r}")


def identity_gr_residual(z1, x2, spec):
    """Relative gap between the two routes to G^R_N: the beta = 2 kernel plus
    boundary term, and the defining sum."""
    a = np.asarray(g_real_b1(z1, x2, spec, "kernel"))
    b = np.asarray(g_real_b1(z1, x2, spec, "sum"))
    scale = np.maximum(np.abs(a), np.abs(b))
    out = np.where(scale > 0, np.abs(a - b) / np.where(scale > 0, scale, 1.0), 0.0)
    return float(out) if out.ndim == 0 else out


def _g_real_sum(z1, x2, spec, weighted):
    n, tau = spec.n, spec.tau
    z1b, x2b = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(x2, dtype=float))
    shape = z1b.shape
    tab = _monic_table(n - 1, z1b.ravel(), tau)
    jm, jl = _j_table(x2b.ravel(), tau, n - 1)
    # (1/j!) p_{j+1}(z1) J_j - p_j(z1) J_{j+1}, p_j = a_j sqrt(j!) e^{M}
    half = 0.5 * special.gammaln(np.arange(n + 1) + 1.0)[:, None]
    j = np.arange(n - 1)
    log_a = half[j + 1] - 2 * half[j] + jl[j]
    log_b = -half[j] + jl[j + 1]
    ref = np.maximum(np.max(log_a, axis=0), np.max(log_b, axis=0))
    t_a = tab.a[j + 1] * jm[j] * np.exp(log_a - ref)
    t_b = tab.a[j] * jm[j + 1] * np.exp(log_b - ref)
    s = np.sum(t_a - t_b, axis=0) / (2.0 * math.sqrt(2.0 * math.pi) * (1.0 + tau))
    log = tab.M + ref + log_weight(1, x2b.ravel(), tau)
    if weighted:
        log = log + log_weight(1, z1b.ravel(), tau) - log_weight(1, x2b.ravel(), tau)
    return _finish(-s, log, shape)


def _g_real_weighted(z1, x2, spec):
    """w(z1)/w(x2) G^R(z1, x2)."""
    (f, fl), (s, sl), z1f, x2f, shape = _b1_gr_parts(z1, x2, spec)
    lw1, lw2 = log_weight(1, z1f, spec.tau), log_weight(1, x2f, spec.tau)
    mant, log = _combine((f, fl + lw1 + lw2), (s, sl + lw1))
    return _finish(-mant, log, shape)


def density_real_b1(x, spec):
    """Density of real eigenvalues, -G^R(x, x) (the factor delta(y) implied)."""
    out = -g_real_b1(np.asarray(x, dtype=float), np.asarray(x, dtype=float), spec)
    return out.real if isinstance(out, np.ndarray) else out.real


def g_complex_b1(z1, z2, spec, weighted=False):
    """G^C(z1, z2) = 2i sgn(y2) w(z2)^2 K^(z1, z2*)."""
    _check(spec, 1)
    z2 = np.asarray(z2, dtype=complex)
    sg = np.sign(z2.imag)
    lw1 = log_weight(1, z1, spec.tau)
    lw2 = log_weight(1, z2, spec.tau)
    # w(z1) w(z2*) K^ * w(z2)/w(z1)  [unweighted]  or  * 1 [weighted gauge]
    extra = 0.0 if weighted else np.broadcast_to(lw2 - lw1, np.broadcast(np.asarray(z1), z2).shape)
    val = _weighted_prekernel_b1(z1, np.conj(z2), spec, extra)
    return 2j * sg * val


def density_complex_b1(z, spec):
    """Density of complex eigenvalues, -G^C(z, z); zero on the real line."""
    out = -g_complex_b1(z, z, spec)
    return out.real if isinstance(out, np.ndarray) else out.real


def w_rr_b1(x1, x2, spec, weighted=False):
    """W^RR_N(x1, x2) from its single-sum form (antisymmetric)."""
    _check(spec, 1)
    n, tau = spec.n, spec.tau
    x1b, x2b = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    shape = x1b.shape
    j1m, j1l = _j_table(x1b.ravel(), tau, n)
    j2m, j2l = _j_table(x2b.ravel(), tau, n)
    tab2 = _monic_table(n - 1, x2b.ravel().astype(complex), tau)
    half = 0.5 * special.gammaln(np.arange(n + 1) + 1.0)[:, None]
    lw1 = log_weight(1, x1b.ravel(), tau)
    lw2 = log_weight(1, x2b.ravel(), tau)
    # sum_j J_j(x1) p_j(x2) w(x2) / j!
    j = np.arange(n)
    logs = j1l[j] + tab2.M[None, :] - half[j]
    ref = np.max(logs, axis=0)
    s1 = np.sum(j1m[j] * tab2.a[j].real * np.exp(logs - ref), axis=0)
    first = (s1, ref + lw2)
    second = (j1m[n - 1] * j2m[n] / (2.0 * (1.0 + tau)),
              j1l[n - 1] + j2l[n] - special.gammaln(n))
    mant, log = _combine(first, second)
    base = 0.0 if weighted else lw1 + lw2
    return _finish(-mant / math.sqrt(2.0 * math.pi), log + base, shape).real


def w_rc_b1(x1, z2, spec, weighted=False):
    """W^RC(x1, z2) = 2i sgn(y2) w(z2)^2 G^R(z2*, x1).

    The sign follows from integrating the real part of the bivariate weight
    against G^C; with it every mixed real/complex correlation is real.
    """
    _check(spec, 1)
    z2 = np.asarray(z2, dtype=complex)
    sg = np.sign(z2.imag)
    if weighted:
        # gauge: divide by w(x1) w(z2); w(z2)^2 G^R(z2*, x1) / (w(x1) w(z2)) = [w(z2)/w(x1)] G^R
        g = _g_real_weighted(np.conj(z2), x1, spec)
    else:
        g = g_real_b1(np.conj(z2), x1, spec) * weight(1, z2, spec.tau) ** 2
    return 2j * sg * g


def w_cc_b1(z1, z2, spec, weighted=False):
    """W^CC(z1, z2) = 4 sgn(y1) sgn(y2) w(z1)^2 w(z2)^2 K^(z1*, z2*)."""
    _check(spec, 1)
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    sg = np.sign(z1.imag) * np.sign(z2.imag)
    extra = 0.0 if weighted else (log_weight(1, z1, spec.tau) + log_weight(1, z2, spec.tau))
    if not weighted:
        extra = np.broadcast_to(extra, np.broadcast(z1, z2).shape)
    # weighted gauge divides by w(z1) w(z2), leaving w(z1) w(z2) K^
    return 4.0 * sg * _weighted_prekernel_b1(np.conj(z1), np.conj(z2), spec, extra)


def matrix_kernel_b1(z1, z2, spec, weighted=False):
    """The block (K^, -G; G(z2, z1), -W) at a pair of points.

    A point with imaginary part exactly 0 is treated as real: G uses G^R
    and W uses W^RR (including the -F term w w sgn(x2-x1)) or W^RC.
    Contact terms between a complex point and its conjugate are excluded.
    With ``weighted`` the gauge diag(w, 1/w) is applied, which keeps all
    Pfaffians unchanged but avoids the exp(x^2) growth of the bare entries.
    """
    _check(spec, 1)
    z1, z2 = complex(z1), complex(z2)
    r1, r2 = z1.imag == 0, z2.imag == 0
    if weighted:
        khat = _weighted_prekernel_b1(z1, z2, spec)
    else:
        khat = prekernel_b1(z1, z2, spec)

    def g_elem(a, b, ra, rb):
        if rb:
            return _g_real_weighted(a, b.real, spec) if weighted else g_real_b1(a, b.real, spec)
        return g_complex_b1(a, b, spec, weighted=weighted)

    g = g_elem(z1, z2, r1, r2)
    g_sw = g_elem(z2, z1, r2, r1)
    parts = {}
    if r1 and r2:
        wrr = w_rr_b1(z1.real, z2.real, spec, weighted=weighted)
        f = np.sign(z2.real - z1.real)
        if not weighted:
            f = f * weight(1, z1.real, spec.tau) * weight(1, z2.real, spec.tau)
        w = wrr - f
        parts["w_rr"] = wrr
    elif r1:
        w = w_rc_b1(z1.real, z2, spec, weighted=weighted)
        parts["w_rc"] = w
    elif r2:
        w = -w_rc_b1(z2.real, z1, spec, weighted=weighted)
        parts["w_rc_swapped"] = -w
    else:
        w = w_cc_b1(z1, z2, spec, weighted=weighted)
        parts["w_cc"] = w
    parts["g_real" if r2 else "g_complex"] = g
    return MatrixKernelBlocks(complex(khat), complex(g), complex(g_sw), complex(w),
                              "finite", (r1, r2), weighted, parts)


def matrix_kernel_b4(z1, z2, spec):
    """Symmetrised beta = 4 block for points in the closed upper half plane.

    Entries are (-2i) sqrt(|y1 y2| w w) times K^ at (z1, z2), (z1, z2*),
    (z1*, z2) and (z1*, z2*).
    """
    _check(spec, 4)
    z1, z2 = complex(z1), complex(z2)
    if z1.imag < 0 or z2.imag < 0:
        raise DomainError("matrix_kernel_b4 needs Im z >= 0 for both arguments")
    a = np.array([z1, z1, z1.conjugate(), z1.conjugate()])
    b = np.array([z2, z2.conjugate(), z2, z2.conjugate()])
    s, log, _ = _kernel_b4_log_plain(a, b, spec)
    pref = -2j * math.sqrt(abs(z1.imag * z2.imag))
    vals = _finish(s * pref, log, (4,))
    block = vals.reshape(2, 2)
    return MatrixKernelBlocks(block[0, 0], -block[0, 1], block[1, 0], -block[1, 1], "finite",
                              (False, False), True, {"block": block})


def _kernel_b4_log_plain(z1, z2, spec):
    t1, t2, shape = _pair_tables(spec.n - 1, z1, z2, spec.tau)
    s = _sum_b4(t1, t2, spec.n) * _C4(spec.tau)
    logw = 0.5 * (log_weight(4, z1, spec.tau) + log_weight(4, z2, spec.tau)).ravel()
    return s, t1.M + t2.M + logw, shape


# ---------------------------------------------------------------------------
# correlation functions


def correlations(points, spec, return_complex=False):
    """k-point correlation function R_k (k <= 4), contact terms excluded.

    beta = 2: det K(z_i, z_j*).  beta = 4: Pfaffian of the symmetrised
    blocks after mapping each point to the upper half plane (R_k is
    invariant under conjugating any argument).  beta = 1: Pfaffian of the
    matrix-kernel; points with Im z == 0 exactly are real eigenvalues and
    the value is the density with respect to dx rather than d^2z.
    """
    pts = [complex(p) for p in points]
    k = len(pts)
    if not 1 <= k <= MAX_POINTS:
        raise DomainError(f"between 1 and {MAX_POINTS} points are supported, got {k}")
    if spec.beta == 2:
        za = np.array(pts)
        mat = kernel_b2(za[:, None], np.conj(za)[None, :], spec)
        val = complex(np.linalg.det(np.atleast_2d(mat)))
    else:
        mat = np.zeros((2 * k, 2 * k), dtype=complex)
        for i in range(k):
            for j in range(i, k):
                if spec.beta == 4:
                    zi = pts[i] if pts[i].imag >= 0 else pts[i].conjugate()
                    zj = pts[j] if pts[j].imag >= 0 else pts[j].conjugate()
                    blk = matrix_kernel_b4(zi, zj, spec).block()
                else:
                    blk = matrix_kernel_b1(pts[i], pts[j], spec, weighted=True).block()
                mat[2 * i:2 * i + 2, 2 * j:2 * j + 2] = blk
                if i != j:
                    mat[2 * j:2 * j + 2, 2 * i:2 * i + 2] = -blk.T
                else:
                    # diagonal blocks are antisymmetric up to rounding
                    mat[2 * i:2 * i + 2, 2 * i:2 * i + 2] = 0.5 * (blk - blk.T)
        val = complex(pfaffian(mat))
    if return_complex:
        return val
    return val.real
