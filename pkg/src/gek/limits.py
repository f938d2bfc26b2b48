"""Large-N edge kernels of the elliptic Ginibre ensembles and their limits.

Coordinates follow the weak non-Hermiticity scaling

    tau = 1 - sigma^2 N^{-1/3},    z = (1 + tau) sqrt(N) + Z N^{-1/6},

with Z = X + iY.  The interpolating kernels are built from the deformed
Airy function Aid(Z) = exp(sigma^6/12 + sigma^2 Z/2) Ai(Z + sigma^4/4)
and are evaluated through the log-scaled integrals of :mod:`gek.quad`, so
the huge prefactors never get exponentiated on their own.

Besides the interpolating kernels the module holds the closed forms of
the limiting regimes: the Hermitian limit sigma -> 0 (Airy kernel and the
beta=1, 4 matrix-kernel elements), the strongly non-Hermitian edge
(erfc kernels, coordinates Zhat = Z / sigma), the Poisson kernels near
the eigenvalue of largest real part, and the bulk sine kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from . import quad
from .errors import DomainError, RangeError
from .quad import QuadratureSpec, Scaled
from .specfun import airy_ai, airy_ai_prime, erfc, log_deformed_airy, log_erfc

# The kernels are defined for any sigma > 0; the cap only reflects where
# the Airy arguments Z + sigma^4/4 stay inside the tested range.
SIGMA_MAX = 16.0

REGIMES = ("interpolating", "hermitian", "strong_edge", "poisson", "bulk")

_SQRT_PI = math.sqrt(math.pi)
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class MicroscopicPoint:
    """An edge coordinate Z = X + iY together with its sigma."""

    Z: complex
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "Z", complex(self.Z))
        if not (math.isfinite(self.Z.real) and math.isfinite(self.Z.imag)):
            raise DomainError(f"Z must be finite, got {self.Z!r}")
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be finite and nonnegative, got {self.sigma!r}")

    @property
    def X(self):
        return self.Z.real

    @property
    def Y(self):
        return self.Z.imag

    def hat(self):
        """Strong-limit coordinate Zhat = Z / sigma."""
        if self.sigma == 0:
            raise DomainError("Zhat is undefined at sigma = 0")
        return self.Z / self.sigma


@dataclass(frozen=True)
class LimitRegime:
    tag: str

    def __post_init__(self):
        if self.tag not in REGIMES:
            raise DomainError(f"unknown regime {self.tag!r}; expected one of {REGIMES}")


def _check_sigma(sigma):
    if not (0 < sigma <= SIGMA_MAX):
        raise DomainError(f"sigma must lie in (0, {SIGMA_MAX:g}], got {sigma!r}")


def _sgn(v):
    return float(np.sign(v))


def _assemble(log_prefactor, terms):
    """exp(log_prefactor) * sum(coef * scaled) without intermediate overflow.

    ``terms`` is a sequence of (coef, Scaled) pairs; log scales may be complex.
    """
    terms = [(c, s) for c, s in terms if c != 0 and s.value != 0]
    if not terms:
        return 0j
    ref = max(float(np.real(s.log_scale)) for _, s in terms)
    total = sum(c * s.value * np.exp(s.log_scale - ref) for c, s in terms)
    if total == 0:
        return 0j
    log_total = complex(log_prefactor) + ref
    log_mag = math.log(abs(total)) + log_total.real
    if log_mag > 709.0:
        raise RangeError(f"kernel magnitude exp({log_mag:.1f}) overflows")
    if log_mag < -745.0:
        return 0j
    return complex(total * np.exp(log_total))


def _log_sqrt_erfc(Y, sigma):
    return 0.5 * log_erfc(abs(Y) / sigma)


# ---------------------------------------------------------------------------
# interpolating kernels


def kernel_ai_b2(Z1, Z2, sigma, spec: QuadratureSpec | None = None):
    """Interpolating Airy kernel for beta = 2.

    K(Z1, Z2) = exp(-(Y1^2 + Y2^2)/(2 sigma^2)) / (sigma sqrt(pi))
                * int_0^inf Aid(Z1 + t) Aid(Z2 + t) dt.

    The density is ``kernel_ai_b2(Z, conj(Z), sigma)``.
    """
    _check_sigma(sigma)
    Z1, Z2 = complex(Z1), complex(Z2)
    integral = quad.aid_product_integral(Z1, Z2, sigma, 0.0, spec)
    log_pref = -(Z1.imag**2 + Z2.imag**2) / (2 * sigma**2) - math.log(sigma * _SQRT_PI)
    return _assemble(log_pref, [(1.0, integral)])


def density_ai_b2(Z, sigma, spec=None):
    Z = complex(Z)
    return kernel_ai_b2(Z, Z.conjugate(), sigma, spec).real


def _nested_difference(Z1, Z2, sigma, spec):
    """{N(Z1, Z2) - N(Z2, Z1)} with N the ordered double integral (outer Z2)."""
    a = quad.aid_nested_integral(Z1, Z2, sigma, 0.0, spec)
    b = quad.aid_nested_integral(Z2, Z1, sigma, 0.0, spec)
    return [(1.0, a), (-1.0, b)]


def kernel_ai_b4(Z1, Z2, sigma, spec: QuadratureSpec | None = None):
    """Interpolating Airy kernel for beta = 4.

    -i sgn(Y1) sqrt|Y1 Y2| / (4 sqrt(pi) sigma^3) exp(-(Y1^2+Y2^2)/(2 sigma^2))
    times the antisymmetrised ordered double integral of Aid(Z2+s) Aid(Z1+t)
    over 0 < t < s.  The sign of Y1 makes ``kernel_ai_b4(Z, conj(Z))`` the
    density in both half planes.
    """
    _check_sigma(sigma)
    Z1, Z2 = complex(Z1), complex(Z2)
    y1, y2 = Z1.imag, Z2.imag
    if y1 == 0 or y2 == 0:
        return 0j
    coef = -1j * _sgn(y1)
    log_pref = (0.5 * math.log(abs(y1 * y2)) - math.log(4 * _SQRT_PI * sigma**3)
                - (y1**2 + y2**2) / (2 * sigma**2))
    terms = [(coef * c, s) for c, s in _nested_difference(Z1, Z2, sigma, spec)]
    return _assemble(log_pref, terms)


def density_ai_b4(Z, sigma, spec=None):
    Z = complex(Z)
    return kernel_ai_b4(Z, Z.conjugate(), sigma, spec).real


def density_ai_b4_im_form(Z, sigma, spec=None):
    """The beta = 4 density written with a single nested integral:

    Y / (2 sqrt(pi) sigma^3) exp(-Y^2/sigma^2) Im[ int ds Aid(Z*+s) int_0^s Aid(Z+t) ].
    """
    _check_sigma(sigma)
    Z = complex(Z)
    Y = Z.imag
    if Y == 0:
        return 0.0
    nested = quad.aid_nested_integral(Z, Z.conjugate(), sigma, 0.0, spec)
    ref = float(np.real(nested.log_scale))
    im_part = (nested.value * np.exp(nested.log_scale - ref)).imag
    log_pref = ref - Y**2 / sigma**2 - math.log(2 * _SQRT_PI * sigma**3)
    return Y * im_part * math.exp(log_pref)


def prekernel_ai_b1(Z1, Z2, sigma, spec: QuadratureSpec | None = None):
    """Interpolating pre-kernel for beta = 1.

    (Z1 - Z2)/(4 sigma^2) sqrt(erfc(|Y1|/sigma) erfc(|Y2|/sigma))
    * int_0^inf [e^{sigma^2 t} - 1] e^{sigma^6/6 + sigma^2 (Z1+Z2)/2}
      Ai(Z1 + sigma^4/4 + t) Ai(Z2 + sigma^4/4 + t) dt
    """
    _check_sigma(sigma)
    Z1, Z2 = complex(Z1), complex(Z2)
    if Z1 == Z2:
        return 0j
    grow = quad.aid_product_integral(Z1, Z2, sigma, 0.0, spec)
    flat = quad.aid_product_integral(Z1, Z2, sigma, -sigma**2, spec)
    log_pref = (_log_sqrt_erfc(Z1.imag, sigma) + _log_sqrt_erfc(Z2.imag, sigma)
                - math.log(4 * sigma**2))
    coef = Z1 - Z2
    return _assemble(log_pref, [(coef, grow), (-coef, flat)])


def g_ai_complex_b1(Z1, Z2, sigma, spec=None):
    """G^C(Z1, Z2) = 2i sgn(Y2) Khat(Z1, conj(Z2))."""
    Z2 = complex(Z2)
    if Z2.imag == 0:
        return 0j
    return 2j * _sgn(Z2.imag) * prekernel_ai_b1(Z1, Z2.conjugate(), sigma, spec)


def density_ai_complex_b1(Z, sigma, spec=None):
    """Density of non-real eigenvalues, -G^C(Z, Z); exactly 0 on the real axis."""
    Z = complex(Z)
    if Z.imag == 0:
        return 0.0
    return (-g_ai_complex_b1(Z, Z, sigma, spec)).real


class RealKernelParts(NamedTuple):
    """The three contributions with -G^R = u1 + u2 + u3."""

    u1: complex
    u2: complex
    u3: complex


def _b_integral(X, sigma, spec):
    return quad.aid_integral(X, sigma, 0.0, spec)


def g_ai_real_parts(Z1, X2, sigma, spec=None):
    _check_sigma(sigma)
    Z1 = complex(Z1)
    X2 = float(X2)
    log_root = _log_sqrt_erfc(Z1.imag, sigma)
    u1 = _assemble(log_root, [(1.0, quad.aid_product_integral(Z1, X2, sigma, 0.0, spec))])
    eai, expo = log_deformed_airy(Z1, sigma)
    u2 = _assemble(log_root, [(0.5, Scaled(complex(eai), complex(expo)))])
    b = _assemble(0.0, [(1.0, _b_integral(X2, sigma, spec))])
    return RealKernelParts(u1, u2, -u2 * b)


def g_ai_real_b1(Z1, X2, sigma, spec=None):
    """G^R(Z1, X2); note the returned value carries the sign of G, i.e.
    the real-eigenvalue density is ``-g_ai_real_b1(X, X, sigma)``."""
    parts = g_ai_real_parts(Z1, X2, sigma, spec)
    return -(parts.u1 + parts.u2 + parts.u3)


def density_ai_real_b1(X, sigma, spec=None):
    return (-g_ai_real_b1(float(X), float(X), sigma, spec)).real


def w_ai_rr_b1(X1, X2, sigma, spec=None):
    """W^RR(X1, X2), from -W^RR = A(X2, X1) - A(X1, X2) + B(X2) - B(X1).

    A(Xa, Xb) is the ordered double integral with Aid(Xa + s) outside and
    Aid(Xb + t) inside.
    """
    _check_sigma(sigma)
    X1, X2 = float(X1), float(X2)
    if X1 == X2:
        return 0.0
    a21 = quad.aid_nested_integral(X1, X2, sigma, 0.0, spec)
    a12 = quad.aid_nested_integral(X2, X1, sigma, 0.0, spec)
    minus_w = _assemble(0.0, [(1.0, a21), (-1.0, a12),
                              (1.0, _b_integral(X2, sigma, spec)),
                              (-1.0, _b_integral(X1, sigma, spec))])
    return -minus_w.real


def w_ai_rc_b1(X1, Z2, sigma, spec=None):
    """W^RC(X1, Z2) = 2i sgn(Y2) G^R(conj(Z2), X1)."""
    Z2 = complex(Z2)
    if Z2.imag == 0:
        return 0j
    return 2j * _sgn(Z2.imag) * g_ai_real_b1(Z2.conjugate(), X1, sigma, spec)


def w_ai_cc_b1(Z1, Z2, sigma, spec=None):
    """W^CC(Z1, Z2) = -2i sgn(Y1) G^C(conj(Z1), Z2)."""
    Z1 = complex(Z1)
    if Z1.imag == 0:
        return 0j
    return -2j * _sgn(Z1.imag) * g_ai_complex_b1(Z1.conjugate(), Z2, sigma, spec)


# ---------------------------------------------------------------------------
# Hermitian limit


def airy_tail_integral(X):
    """int_X^inf Ai(t) dt for real X."""
    X = float(X)
    if X >= 0:
        # Ai(X + t) / Ai(X) < exp(-sqrt(X) t), so 30 + 60/sqrt(X) units suffice
        # integrated relative to Ai(X) so that deep tails keep relative accuracy
        upper = X + min(30.0, 60.0 / math.sqrt(X) if X > 0 else 30.0)
        a = airy_ai(X).real
        return a * quad.integrate(lambda t: airy_ai(t).real / a, X, upper).real
    return 1.0 / 3.0 + quad.integrate(lambda t: airy_ai(t).real, X, 0.0).real


def _airy_real(X):
    return airy_ai(float(X)).real, airy_ai_prime(float(X)).real


def hermitian_airy_kernel(X1, X2):
    """Airy kernel (Ai(X1)Ai'(X2) - Ai'(X1)Ai(X2)) / (X1 - X2).

    Within 1e-6 of the diagonal the confluent form Ai'(X)^2 - X Ai(X)^2 is
    used at the midpoint.
    """
    X1, X2 = float(X1), float(X2)
    if abs(X1 - X2) < 1e-6:
        X = 0.5 * (X1 + X2)
        a, ap = _airy_real(X)
        return ap * ap - X * a * a
    a1, ap1 = _airy_real(X1)
    a2, ap2 = _airy_real(X2)
    return (a1 * ap2 - ap1 * a2) / (X1 - X2)


def _airy_cutoff(*xs):
    # Ai(x) < 1e-60 for x > 23; past that the integrands are negligible
    return 30.0 + max(0.0, -min(xs))


def _airy_integral(f, *xs, spec=None):
    spec = spec or QuadratureSpec()
    return quad.integrate(f, 0.0, _airy_cutoff(*xs), spec).real


def airy_kernel_integral(X1, X2, spec=None):
    """int_0^inf Ai(X1 + t) Ai(X2 + t) dt by quadrature."""
    return _airy_integral(lambda t: (airy_ai(X1 + t) * airy_ai(X2 + t)).real, X1, X2, spec=spec)


def _dkernel_dx2(X1, X2):
    """d/dX2 of the Airy kernel, i.e. int_0^inf Ai(X1 + t) Ai'(X2 + t) dt."""
    X1, X2 = float(X1), float(X2)
    d = X1 - X2
    if abs(d) < 1e-3:
        return _airy_integral(lambda t: (airy_ai(X1 + t) * airy_ai_prime(X2 + t)).real, X1, X2)
    a1, ap1 = _airy_real(X1)
    a2, ap2 = _airy_real(X2)
    return (a1 * X2 * a2 - ap1 * ap2) / d + (a1 * ap2 - ap1 * a2) / d**2


class HermitianB4Elements(NamedTuple):
    T1: float
    T2: float
    T3: float
    T4: float


def _kernel_column_integral(X1, X2, spec=None):
    """int_{X2}^{X1} K_Airy(t, X2) dt."""
    if X1 == X2:
        return 0.0
    spec = spec or QuadratureSpec()
    f = np.vectorize(lambda t: hermitian_airy_kernel(t, X2))
    return quad.integrate(f, X2, X1, spec).real


def _airy_between(X1, X2):
    """int_{X2}^{X1} Ai(t) dt."""
    return airy_tail_integral(X2) - airy_tail_integral(X1)


def hermitian_elements_b4(X1, X2, spec=None):
    """The four functions T1..T4 of the sigma -> 0 beta = 4 matrix-kernel.

    T2 and T3 use the Airy kernel closed form, T1 a single integral of it,
    and T4 the single integral of Ai(X1+s)Ai'(X2+s) - Ai(X2+s)Ai'(X1+s).
    """
    X1, X2 = float(X1), float(X2)
    K = hermitian_airy_kernel(X1, X2)
    a1 = _airy_real(X1)[0]
    a2 = _airy_real(X2)[0]
    T2 = 2 * K - a1 * airy_tail_integral(X2)
    T3 = 2 * K - a2 * airy_tail_integral(X1)
    T4 = _airy_integral(
        lambda s: (airy_ai(X1 + s) * airy_ai_prime(X2 + s)
                   - airy_ai(X2 + s) * airy_ai_prime(X1 + s)).real, X1, X2, spec=spec)
    T1 = (2 * _kernel_column_integral(X1, X2, spec)
          - _airy_between(X1, X2) * airy_tail_integral(X2))
    return HermitianB4Elements(T1, T2, T3, T4)


def hermitian_density_b4(X):
    """Ridge-integrated sigma -> 0 beta = 4 density, the weight of delta(Y):

    (1/2) int_0^inf Ai(X+s)^2 ds - (1/4) Ai(X) int_X^inf Ai.
    """
    X = float(X)
    return 0.5 * hermitian_airy_kernel(X, X) - 0.25 * _airy_real(X)[0] * airy_tail_integral(X)


def hermitian_density_real_b1(X):
    """sigma -> 0 real-eigenvalue density for beta = 1."""
    X = float(X)
    return (hermitian_airy_kernel(X, X)
            + 0.5 * _airy_real(X)[0] * (1.0 - airy_tail_integral(X)))


class HermitianB1Elements(NamedTuple):
    """sigma -> 0 matrix-kernel elements for beta = 1 (real arguments).

    ``minus_g`` and ``minus_w_rr`` carry the same signs as -G^R and -W^RR.
    The three elements that involve a complex argument vanish identically.
    """

    khat: float
    minus_g: float
    minus_w_rr: float
    g_complex: float = 0.0
    w_rc: float = 0.0
    w_cc: float = 0.0


def hermitian_elements_b1(X1, X2, spec=None):
    X1, X2 = float(X1), float(X2)
    a1 = _airy_real(X1)[0]
    a2 = _airy_real(X2)[0]
    K = hermitian_airy_kernel(X1, X2)
    tail2 = airy_tail_integral(X2)
    khat = 0.5 * (_dkernel_dx2(X1, X2) + 0.5 * a1 * a2)
    minus_g = K + 0.5 * a1 * (1.0 - tail2)
    minus_w = 2 * (_kernel_column_integral(X1, X2, spec)
                   + 0.5 * _airy_between(X1, X2) * (1.0 - tail2))
    return HermitianB1Elements(khat, minus_g, minus_w)


# ---------------------------------------------------------------------------
# strongly non-Hermitian edge


def _gauss_erfc_integral(Za, Zb, spec=None):
    """int_0^inf exp(-(u + Za)^2 / 2) erfc((u + Zb)/sqrt(2)) du."""
    spec = spec or QuadratureSpec()
    Za, Zb = complex(Za), complex(Zb)
    upper = 40.0 + max(0.0, -Za.real, -Zb.real)

    def f(u):
        return np.exp(-(u + Za) ** 2 / 2) * special.erfc((u + Zb) / _SQRT2)

    return complex(quad.integrate(f, 0.0, upper, spec))


def strong_edge_kernel_b2(Zh1, Zh2):
    Zh1, Zh2 = complex(Zh1), complex(Zh2)
    return (np.exp(-(Zh1.imag**2 + Zh2.imag**2) / 2 - (Zh1 - Zh2) ** 2 / 4)
            * erfc((Zh1 + Zh2) / 2) / (2 * math.pi))


def strong_edge_kernel_b4(Zh1, Zh2, spec=None):
    """Strong-limit beta = 4 kernel in its single-integral erfc form.

    As for :func:`kernel_ai_b4` a factor sgn(Yhat1) is included.
    """
    Zh1, Zh2 = complex(Zh1), complex(Zh2)
    y1, y2 = Zh1.imag, Zh2.imag
    if y1 == 0 or y2 == 0:
        return 0j
    pref = (-1j * _sgn(y1) * math.sqrt(abs(y1 * y2)) / (4 * _SQRT2 * math.pi)
            * math.exp(-(y1**2 + y2**2) / 2))
    body = _gauss_erfc_integral(Zh1, Zh2, spec) - _gauss_erfc_integral(Zh2, Zh1, spec)
    return pref * body


def _strong_khat_b1(Zh1, Zh2):
    Zh1, Zh2 = complex(Zh1), complex(Zh2)
    roots = math.sqrt(erfc(abs(Zh1.imag)) * erfc(abs(Zh2.imag)))
    return ((Zh1 - Zh2) / (8 * _SQRT_PI) * roots
            * np.exp(-(Zh1 - Zh2) ** 2 / 4) * erfc((Zh1 + Zh2) / 2))


def _strong_g_real_b1(Zh1, Xh2):
    """G^R at the strong edge (with the sign of G, not -G)."""
    Zh1, Xh2 = complex(Zh1), float(Xh2)
    root = math.sqrt(erfc(abs(Zh1.imag)))
    minus_g = (root / (2 * _SQRT_PI) * np.exp(-(Zh1 - Xh2) ** 2 / 4) * erfc((Zh1 + Xh2) / 2)
               + root / math.sqrt(2 * math.pi) * np.exp(-Zh1**2 / 2)
               * (1 - 0.5 * erfc(Xh2 / _SQRT2)))
    return -complex(minus_g)


def strong_p(Xh1, Xh2, spec=None):
    """P(X1, X2) = (1/sqrt(2 pi)) int_0^inf exp(-(X2+s)^2/2) erf((X1+s)/sqrt(2)) ds."""
    spec = spec or QuadratureSpec()
    Xh1, Xh2 = float(Xh1), float(Xh2)
    upper = 40.0 + max(0.0, -Xh2)

    def f(s):
        return np.exp(-(Xh2 + s) ** 2 / 2) * special.erf((Xh1 + s) / _SQRT2)

    return quad.integrate(f, 0.0, upper, spec).real / math.sqrt(2 * math.pi)


def strong_q(Xh):
    return 0.5 * erfc(float(Xh) / _SQRT2)


def _strong_w_rr_b1(Xh1, Xh2, spec=None):
    minus_w = (strong_p(Xh1, Xh2, spec) - strong_p(Xh2, Xh1, spec)
               + strong_q(Xh2) - strong_q(Xh1))
    return -minus_w


class StrongEdgeB1(NamedTuple):
    """Strong-limit beta = 1 matrix-kernel elements at (Zhat1, Zhat2).

    Real-argument elements use the real parts of the inputs.
    """

    khat: complex
    g_complex: complex
    g_real: complex
    w_rr: float
    w_rc: complex
    w_cc: complex


def strong_edge_elements_b1(Zh1, Zh2, spec=None):
    Zh1, Zh2 = complex(Zh1), complex(Zh2)
    y1, y2 = Zh1.imag, Zh2.imag
    khat = _strong_khat_b1(Zh1, Zh2)
    g_c = 2j * _sgn(y2) * _strong_khat_b1(Zh1, Zh2.conjugate())
    g_r = _strong_g_real_b1(Zh1, Zh2.real)
    w_rr = _strong_w_rr_b1(Zh1.real, Zh2.real, spec)
    w_rc = -2j * _sgn(y2) * _strong_g_real_b1(Zh2.conjugate(), Zh1.real)
    w_cc = 4 * _sgn(y1) * _sgn(y2) * _strong_khat_b1(Zh1.conjugate(), Zh2.conjugate())
    return StrongEdgeB1(complex(khat), complex(g_c), g_r, w_rr, complex(w_rc), complex(w_cc))


def strong_edge_kernel(beta, Zh1, Zh2, spec=None):
    """Kernel at the strongly non-Hermitian edge; beta = 1 returns the element set."""
    if beta == 2:
        return complex(strong_edge_kernel_b2(Zh1, Zh2))
    if beta == 4:
        return strong_edge_kernel_b4(Zh1, Zh2, spec)
    if beta == 1:
        return strong_edge_elements_b1(Zh1, Zh2, spec)
    raise DomainError(f"beta must be 1, 2 or 4, got {beta!r}")


def strong_edge_density(beta, Zh, channel="complex", spec=None):
    """Strong-limit densities; ``channel='real'`` only for beta = 1."""
    Zh = complex(Zh)
    if channel == "real":
        if beta != 1:
            raise DomainError("only beta = 1 has a real-eigenvalue density")
        X = Zh.real
        return (erfc(X) + math.exp(-X * X / 2) * erfc(-X / _SQRT2) / _SQRT2) / (2 * _SQRT_PI)
    if beta == 2:
        return erfc(Zh.real) / (2 * math.pi)
    if beta == 4:
        return strong_edge_kernel_b4(Zh, Zh.conjugate(), spec).real
    if beta == 1:
        Y = Zh.imag
        if Y == 0:
            return 0.0
        return (-2j * _sgn(Y) * _strong_khat_b1(Zh, Zh.conjugate())).real
    raise DomainError(f"beta must be 1, 2 or 4, got {beta!r}")


# ---------------------------------------------------------------------------
# Poisson and bulk


def poisson_kernel(beta, z1, z2):
    """Poisson kernel near the eigenvalue of largest real part.

    The Kronecker delta in y1 = -y2 is an exact floating comparison: the
    caller supplies the conjugate branch explicitly.
    """
    z1, z2 = complex(z1), complex(z2)
    if z1.imag != -z2.imag:
        return 0j
    m2 = math.exp(-(z1.real + z2.real + z1.imag**2 + z2.imag**2) / 2) / _SQRT_PI
    if beta == 2:
        return complex(m2)
    if beta == 4:
        return complex(0.5 * m2)
    if beta == 1:
        return 0.5j * _sgn(z1.imag) * m2
    raise DomainError(f"beta must be 1, 2 or 4, got {beta!r}")


def bulk_sine_kernel(z1, z2, sigma, spec=None):
    """Interpolating sine kernel in the bulk.

    exp(-(y1^2+y2^2)/(2 sigma^2)) / (2 sigma pi^{3/2})
    * int_0^1 ds e^{-s sigma^2} cos(sqrt(s)(z1 - z2)) / sqrt(s),

    integrated in u = sqrt(s), where the integrand is smooth.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    z1, z2 = complex(z1), complex(z2)
    spec = spec or QuadratureSpec()
    d = z1 - z2

    def f(u):
        return 2.0 * np.exp(-(u * sigma) ** 2) * np.cos(u * d)

    integral = quad.integrate(f, 0.0, 1.0, spec)
    pref = math.exp(-(z1.imag**2 + z2.imag**2) / (2 * sigma**2)) / (2 * sigma * math.pi**1.5)
    value = complex(pref * integral)
    if z1.imag == 0 and z2.imag == 0:
        return complex(value.real)
    return value


# ---------------------------------------------------------------------------
# dispatch used by the command line


def density(beta, Z, sigma, channel="complex", spec=None):
    """Interpolating edge density for any beta (channel 'real' for beta = 1)."""
    if channel == "real":
        if beta != 1:
            raise DomainError("only beta = 1 has a real-eigenvalue density")
        return density_ai_real_b1(complex(Z).real, sigma, spec)
    if beta == 2:
        return density_ai_b2(Z, sigma, spec)
    if beta == 4:
        return density_ai_b4(Z, sigma, spec)
    if beta == 1:
        return density_ai_complex_b1(Z, sigma, spec)
    raise DomainError(f"beta must be 1, 2 or 4, got {beta!r}")
