"""Special functions for complex arguments.

Airy and error functions are thin wrappers around :mod:`scipy.special`
(AMOS and Faddeeva backends) with input validation and a real path for
real input.  Hermite polynomials are carried in log-scaled form because
the finite-N kernels need degrees in the hundreds at arguments of order
sqrt(N), where the raw values overflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, RangeError, StructureError

AIRY_MAX_ABS = 1.0e4
# the scaled form only needs airye, which stays accurate far beyond |z| = 1e4
DEFORMED_AIRY_MAX_ABS = 1.0e8
HERMITE_MAX_DEGREE = 10**6
PFAFFIAN_MAX_DIM = 12

# rescale the Hermite recurrence when magnitudes leave [1/BIG, BIG]
_BIG = 1.0e150


def _check_finite(z, name="z"):
    arr = np.asarray(z)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {z!r}")


def _is_real_input(z):
    arr = np.asarray(z)
    return not np.iscomplexobj(arr) or bool(np.all(arr.imag == 0))


def _clean_complex(z):
    # -0.0 imaginary parts would select the other sqrt branch
    z = np.asarray(z, dtype=complex)
    return z.real + 1j * (z.imag + 0.0)


def _airy_parts(z):
    _check_finite(z)
    if np.any(np.abs(np.asarray(z)) > AIRY_MAX_ABS):
        raise DomainError(f"|z| must not exceed {AIRY_MAX_ABS:g}")
    if _is_real_input(z):
        x = np.real(np.asarray(z, dtype=complex))
        ai, aip, _, _ = special.airy(x)
        return ai.astype(complex), aip.astype(complex)
    ai, aip, _, _ = special.airy(_clean_complex(z))
    return ai, aip


def _scalar_or_array(z, value):
    if np.ndim(z) == 0:
        return complex(value)
    return value


def airy_ai(z):
    """Airy function Ai(z); accepts scalars or arrays."""
    ai, _ = _airy_parts(z)
    return _scalar_or_array(z, ai)


def airy_ai_prime(z):
    """Derivative Ai'(z); accepts scalars or arrays."""
    _, aip = _airy_parts(z)
    return _scalar_or_array(z, aip)


def airy_zeta(w):
    """(2/3) w^{3/2} on the principal branch, the exponent removed by scipy's airye."""
    w = _clean_complex(w)
    return (2.0 / 3.0) * w * np.sqrt(w)


def scaled_airy(w):
    """Return (eAi, zeta) with Ai(w) = eAi * exp(-zeta).

    eAi stays O(|w|^{-1/4}) in the right half plane, so products of many
    Airy factors can be combined in log space.
    """
    w = _clean_complex(w)
    _check_finite(w, "w")
    eai = special.airye(w)[0]
    return eai, airy_zeta(w)


def erfc(z):
    """Complementary error function for real or complex input."""
    _check_finite(z)
    if _is_real_input(z):
        out = special.erfc(np.real(np.asarray(z, dtype=complex)))
        return float(out) if np.ndim(z) == 0 else out
    out = special.erfc(np.asarray(z, dtype=complex))
    return complex(out) if np.ndim(z) == 0 else out


def log_erfc(x):
    """log erfc(x) for real x, accurate where erfc underflows."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, np.log(special.erfcx(np.maximum(x, 0.0))) - np.maximum(x, 0.0) ** 2,
                   np.log(special.erfc(np.minimum(x, 0.0))))
    return float(out) if out.ndim == 0 else out


def log_factorial(n):
    return special.gammaln(np.asarray(n, dtype=float) + 1.0)


def log_double_factorial(n):
    """log n!! for integer n >= -1 (with (-1)!! = 0!! = 1)."""
    n = np.asarray(n, dtype=float)
    even = np.mod(n, 2) == 0
    half = n / 2.0
    log_even = half * math.log(2.0) + special.gammaln(half + 1.0)
    log_odd = (n + 1.0) / 2.0 * math.log(2.0) + special.gammaln(half + 1.0) - 0.5 * math.log(math.pi)
    out = np.where(even, log_even, log_odd)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LogScaledValue:
    """A complex number stored as exp(log_magnitude) * phase."""

    log_magnitude: float
    phase: complex
    zero_flag: bool = False

    @classmethod
    def from_complex(cls, v):
        v = complex(v)
        if v == 0:
            return cls(-math.inf, 1.0 + 0j, True)
        return cls(math.log(abs(v)), v / abs(v), False)

    def value(self):
        if self.zero_flag:
            return 0j
        if self.log_magnitude > 709.0:
            raise RangeError(f"value exp({self.log_magnitude:.1f}) overflows double precision")
        return math.exp(self.log_magnitude) * self.phase

    def __mul__(self, other):
        if not isinstance(other, LogScaledValue):
            other = LogScaledValue.from_complex(other)
        if self.zero_flag or other.zero_flag:
            return LogScaledValue(-math.inf, 1.0 + 0j, True)
        return LogScaledValue(self.log_magnitude + other.log_magnitude, self.phase * other.phase)


def hermite_h(n, z):
    """Physicists' Hermite polynomial H_n(z) as a :class:`LogScaledValue`.

    Runs the three-term recurrence H_{k+1} = 2z H_k - 2k H_{k-1} and
    renormalises whenever the running values leave [1e-150, 1e150].
    """
    if int(n) != n or n < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {n!r}")
    if n > HERMITE_MAX_DEGREE:
        raise DomainError(f"degree must not exceed {HERMITE_MAX_DEGREE}")
    n = int(n)
    z = complex(z)
    if not cmath.isfinite(z):
        raise DomainError(f"z must be finite, got {z!r}")
    if n == 0:
        return LogScaledValue(0.0, 1.0 + 0j)
    prev, cur, shift = 1.0 + 0j, 2.0 * z, 0.0
    for k in range(1, n):
        prev, cur = cur, 2.0 * z * cur - 2.0 * k * prev
        size = max(abs(cur), abs(prev))
        if size > _BIG or (0 < size < 1.0 / _BIG):
            prev /= size
            cur /= size
            shift += math.log(size)
    if cur == 0:
        return LogScaledValue(-math.inf, 1.0 + 0j, True)
    return LogScaledValue(shift + math.log(abs(cur)), cur / abs(cur))


def hermite_table(nmax, z):
    """H_0..H_nmax at every point of ``z`` in scaled form.

    Returns ``(mant, logscale)`` of shape ``(nmax+1,) + z.shape`` with
    H_n(z) = mant[n] * exp(logscale[n]).  |mant| stays within [1e-150, 1e150].
    """
    z = np.asarray(z, dtype=complex)
    mant = np.empty((nmax + 1,) + z.shape, dtype=complex)
    logscale = np.zeros((nmax + 1,) + z.shape)
    shift = np.zeros(z.shape)
    prev = np.ones(z.shape, dtype=complex)
    mant[0] = prev
    if nmax == 0:
        return mant, logscale
    cur = 2.0 * z
    mant[1] = cur
    for k in range(1, nmax):
        prev, cur = cur, 2.0 * z * cur - 2.0 * k * prev
        mant[k + 1] = cur
        logscale[k + 1] = shift
        size = np.maximum(np.abs(cur), np.abs(prev))
        rescale = (size > _BIG) | ((size > 0) & (size < 1.0 / _BIG))
        if np.any(rescale):
            factor = np.where(rescale, size, 1.0)
            prev = prev / factor
            cur = cur / factor
            shift = shift + np.log(factor)
    return mant, logscale


def log_deformed_airy(Z, sigma):
    """Return (eAi, exponent) with Aid(Z, sigma) = eAi * exp(exponent).

    The exponent sigma^6/12 + sigma^2 Z/2 - (2/3) w^{3/2}, w = Z + sigma^4/4,
    is evaluated in the cancellation-free form
    -(2/3) Z^2 (1 - r/(2(sqrt(w)+r))) / (sqrt(w)+r),  r = sigma^2/2.
    """
    if sigma < 0:
        raise DomainError(f"sigma must be nonnegative, got {sigma!r}")
    Z = _clean_complex(Z)
    _check_finite(Z, "Z")
    r = 0.5 * sigma * sigma
    w = Z + r * r
    if np.any(np.abs(w) > DEFORMED_AIRY_MAX_ABS):
        raise DomainError(f"|Z + sigma^4/4| must not exceed {DEFORMED_AIRY_MAX_ABS:g}")
    eai = special.airye(w)[0]
    sw = np.sqrt(w)
    denom = sw + r
    with np.errstate(invalid="ignore", divide="ignore"):
        expo = -(2.0 / 3.0) * Z * Z * (1.0 - 0.5 * r / denom) / denom
    # w = 0 only when sigma = 0 and Z = 0, where the exponent vanishes
    expo = np.where(denom == 0, 0.0, expo)
    return eai, expo


def deformed_airy(Z, sigma):
    """Aid(Z, sigma) = exp(sigma^6/12 + sigma^2 Z/2) Ai(Z + sigma^4/4)."""
    eai, expo = log_deformed_airy(Z, sigma)
    if np.any((np.real(expo) > 709.0) & (eai != 0)):
        raise RangeError(
            f"deformed Airy overflows: exponent {np.max(np.real(expo)):.1f} at sigma={sigma}")
    out = eai * np.exp(expo)
    return _scalar_or_array(Z, out)


def pfaffian(A):
    """Pfaffian of an even-dimensional antisymmetric matrix (dim <= 12).

    Recursive cofactor expansion along the first row.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise StructureError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n % 2:
        raise StructureError(f"Pfaffian needs even dimension, got {n}")
    if n > PFAFFIAN_MAX_DIM:
        raise StructureError(f"dimension {n} exceeds the supported maximum {PFAFFIAN_MAX_DIM}")
    scale = np.max(np.abs(A)) if n else 0.0
    if n and np.max(np.abs(A + A.T)) > 1e-10 * scale:
        raise StructureError("matrix is not antisymmetric")
    return _pf(A.tolist(), list(range(n)))


def _pf(a, idx):
    if not idx:
        return 1.0 + 0j
    i = idx[0]
    total = 0j
    for pos in range(1, len(idx)):
        j = idx[pos]
        if a[i][j] == 0:
            continue
        rest = idx[1:pos] + idx[pos + 1:]
        sign = 1.0 if pos % 2 == 1 else -1.0
        total += sign * a[i][j] * _pf(a, rest)
    return total
