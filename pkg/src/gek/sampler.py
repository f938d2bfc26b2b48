"""Monte Carlo sampling of elliptic Ginibre matrices.

Matrices are drawn as J = sqrt((1+tau)/2) H + sqrt((1-tau)/2) A with H
Hermitian (real symmetric, quaternion self-dual) and A anti-Hermitian,
each normalised so that off-diagonal entries have unit mean square.  Then
<|J_ij|^2> = 1 and <J_ij J_ji> = tau, which places the spectral edge at
(1+tau) sqrt(n), matching the finite-n kernels of :mod:`gek.finite_n`.

For beta = 4 the quaternion matrix is stored in its n x n complex
representation with blocks (P, R; -conj(R), conj(P)); its n eigenvalues
come in complex-conjugate pairs.

Every trial draws from its own stream, SeedSequence([seed, trial]), so a
batch can be split across workers and still be reproduced bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import stats

from .errors import CapacityError, ConvergenceError, DomainError, StructureError, UsageError
from .finite_n import EnsembleSpec

MAX_N = {1: 512, 2: 512, 4: 512}
DEFAULT_WINDOW = 10.0


def _rng(seed, trial):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(trial)])))


def _ginibre_complex(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)


def _quaternion_ginibre(rng, m):
    p = _ginibre_complex(rng, m)
    r = _ginibre_complex(rng, m)
    return np.block([[p, r], [-r.conj(), p.conj()]])


def sample_matrix(spec: EnsembleSpec, seed, trial=0):
    """One draw of J for ``spec`` from the stream (seed, trial)."""
    if spec.n > MAX_N[spec.beta]:
        raise CapacityError(f"n={spec.n} exceeds the sampler limit {MAX_N[spec.beta]} for beta={spec.beta}")
    rng = _rng(seed, trial)
    n, tau = spec.n, spec.tau
    c_h, c_a = math.sqrt((1.0 + tau) / 2.0), math.sqrt((1.0 - tau) / 2.0)
    if spec.beta == 1:
        g, g2 = rng.standard_normal((n, n)), rng.standard_normal((n, n))
        h, a = (g + g.T) / math.sqrt(2.0), (g2 - g2.T) / math.sqrt(2.0)
    elif spec.beta == 2:
        g, g2 = _ginibre_complex(rng, n), _ginibre_complex(rng, n)
        h, a = (g + g.conj().T) / math.sqrt(2.0), (g2 - g2.conj().T) / math.sqrt(2.0)
    else:
        m = n // 2
        g, g2 = _quaternion_ginibre(rng, m), _quaternion_ginibre(rng, m)
        h, a = (g + g.conj().T) / math.sqrt(2.0), (g2 - g2.conj().T) / math.sqrt(2.0)
    return c_h * h + c_a * a


def is_quaternion_structured(matrix):
    """True if ``matrix`` has the block form (P, R; -conj(R), conj(P)) exactly."""
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    if n % 2:
        return False
    m = n // 2
    p, r = matrix[:m, :m], matrix[:m, m:]
    return bool(np.array_equal(matrix[m:, :m], -r.conj()) and np.array_equal(matrix[m:, m:], p.conj()))


def spectrum(matrix):
    """All eigenvalues of a square matrix (LAPACK geev: balancing, Hessenberg, shifted QR)."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise StructureError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DomainError("matrix entries must be finite")
    try:
        return np.linalg.eigvals(matrix)
    except np.linalg.LinAlgError as exc:
        err = ConvergenceError(f"eigenvalue iteration failed: {exc}")
        err.matrix = matrix
        raise err from exc


def eigen_residual(matrix, count=None):
    """max ||J v - lambda v|| / ||J|| over (a subset of) unit eigenvectors."""
    matrix = np.asarray(matrix)
    vals, vecs = np.linalg.eig(matrix)
    if count is not None:
        vals, vecs = vals[:count], vecs[:, :count]
    res = np.linalg.norm(matrix @ vecs - vecs * vals, axis=0)
    return float(np.max(res) / np.linalg.norm(matrix, 2))


def edge_rescale(eigs, spec: EnsembleSpec, side="right", window=DEFAULT_WINDOW):
    """Microscopic coordinates Z around the right or left end of the ellipse.

    right: Z = (z - (1+tau) sqrt(n)) n^{1/6};  left: Z = -(z + (1+tau) sqrt(n)) n^{1/6}.
    Only points with |Z| <= window are returned.
    """
    eigs = np.asarray(eigs, dtype=complex)
    edge = (1.0 + spec.tau) * math.sqrt(spec.n)
    scale = spec.n ** (1.0 / 6.0)
    if side == "right":
        Z = (eigs - edge) * scale
    elif side == "left":
        Z = -(eigs + edge) * scale
    else:
        raise DomainError(f"side must be 'right' or 'left', got {side!r}")
    return Z[np.abs(Z) <= window]


def real_threshold(n):
    return 1e-8 * math.sqrt(n)


@dataclass
class SampleBatch:
    """Eigenvalues of ``trials`` independent draws (one array per trial)."""

    spec: EnsembleSpec
    seed: int
    trials: int
    eigenvalues: list = field(default_factory=list)

    def real_mask(self, k):
        """Flags for eigenvalues of trial ``k`` treated as real (beta = 1 only)."""
        eigs = self.eigenvalues[k]
        if self.spec.beta != 1:
            return np.zeros(eigs.shape, dtype=bool)
        return np.abs(eigs.imag) <= real_threshold(self.spec.n)

    def max_real_parts(self):
        return np.array([np.max(e.real) for e in self.eigenvalues])

    def rows(self):
        """(trial, re, im, channel) rows; channel is 'real' or 'complex'."""
        out = []
        for k, eigs in enumerate(self.eigenvalues):
            mask = self.real_mask(k)
            for z, is_real in zip(eigs, mask):
                out.append((k, float(z.real), float(z.imag), "real" if is_real else "complex"))
        return out


def _one_trial(spec, seed, trial):
    eigs = spectrum(sample_matrix(spec, seed, trial))
    if spec.beta == 1:
        # LAPACK returns real eigenvalues of real matrices with zero imaginary part;
        # snap anything within the noise floor as well
        eigs = np.where(np.abs(eigs.imag) <= real_threshold(spec.n), eigs.real + 0j, eigs)
    return eigs


def sample_batch(spec: EnsembleSpec, seed, trials, workers=1, first_trial=0):
    """Draw ``trials`` matrices and return their spectra as a :class:`SampleBatch`."""
    if trials < 0:
        raise DomainError(f"trials must be nonnegative, got {trials!r}")
    indices = range(first_trial, first_trial + trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            eigs = list(pool.map(lambda k: _one_trial(spec, seed, k), indices))
    else:
        eigs = [_one_trial(spec, seed, k) for k in indices]
    return SampleBatch(spec, int(seed), int(trials), eigs)


def conjugate_pairing_residual(eigs):
    """Largest distance between the non-real eigenvalues and the conjugates of their partners."""
    eigs = np.asarray(eigs, dtype=complex)
    upper = np.sort_complex(eigs[eigs.imag > 0])
    lower = np.sort_complex(eigs[eigs.imag < 0].conj())
    if upper.size != lower.size:
        return math.inf
    if upper.size == 0:
        return 0.0
    return float(np.max(np.abs(upper - lower)))


# ---------------------------------------------------------------------------
# histograms


@dataclass(frozen=True)
class Grid:
    """Bin edges in microscopic coordinates; ``y_edges`` is None for a 1-D grid."""

    x_edges: np.ndarray
    y_edges: np.ndarray | None = None

    @classmethod
    def uniform(cls, x_range, x_bins, y_range=None, y_bins=None):
        x = np.linspace(x_range[0], x_range[1], x_bins + 1)
        y = None if y_range is None else np.linspace(y_range[0], y_range[1], y_bins + 1)
        return cls(x, y)

    @property
    def shape(self):
        if self.y_edges is None:
            return (len(self.x_edges) - 1,)
        return (len(self.x_edges) - 1, len(self.y_edges) - 1)

    def bin_measure(self):
        dx = np.diff(self.x_edges)
        if self.y_edges is None:
            return dx
        return dx[:, None] * np.diff(self.y_edges)[None, :]


@dataclass
class EdgeHistogram:
    """Counts of microscopic eigenvalues per bin.

    Because the points are binned in Z coordinates, dividing by trials and
    the bin measure in Z already includes the Jacobian n^{-1/3} (area) or
    n^{-1/6} (length) between z and Z, so :meth:`density` estimates the
    microscopic R_1 directly.

    For beta = 4 each conjugate pair is a single variable of the joint
    density, spread over both half planes, so R_1 is half the density of
    sampled eigenvalues; ``multiplicity`` = 2 accounts for that.
    """

    grid: Grid
    counts: np.ndarray
    trials: int
    channel: str
    multiplicity: int = 1

    @property
    def normalization(self):
        return self.trials * self.multiplicity * self.grid.bin_measure()

    def density(self):
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.normalization > 0, self.counts / self.normalization, 0.0)

    def errors(self):
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.normalization > 0, np.sqrt(self.counts) / self.normalization, 0.0)

    def merge(self, other):
        if other.channel != self.channel or not (
                np.array_equal(other.grid.x_edges, self.grid.x_edges)
                and (other.grid.y_edges is None) == (self.grid.y_edges is None)
                and (self.grid.y_edges is None or np.array_equal(other.grid.y_edges, self.grid.y_edges))):
            raise UsageError("histograms must share grid and channel to be merged")
        if other.multiplicity != self.multiplicity:
            raise UsageError("histograms must share the multiplicity to be merged")
        return EdgeHistogram(self.grid, self.counts + other.counts, self.trials + other.trials,
                             self.channel, self.multiplicity)


def accumulate_density(batches, grid: Grid, channel="complex_plane", side="right"):
    """Histogram the rescaled eigenvalues of ``batches`` on ``grid``.

    ``channel`` is 'complex_plane' (non-real eigenvalues on a 2-D grid) or
    'real_axis' (beta = 1 real eigenvalues on a 1-D grid).
    """
    if isinstance(batches, SampleBatch):
        batches = [batches]
    if channel not in ("complex_plane", "real_axis"):
        raise UsageError(f"channel must be 'complex_plane' or 'real_axis', got {channel!r}")
    specs = {b.spec for b in batches}
    if len(specs) > 1:
        raise UsageError("batches must share one ensemble spec")
    if channel == "real_axis" and grid.y_edges is not None:
        raise UsageError("the real-axis channel needs a 1-D grid")
    if channel == "complex_plane" and grid.y_edges is None:
        raise UsageError("the complex-plane channel needs a 2-D grid")
    counts = np.zeros(grid.shape, dtype=np.int64)
    trials = 0
    for batch in batches:
        if channel == "real_axis" and batch.spec.beta == 2:
            raise UsageError("beta = 2 has no real-axis channel")
        trials += batch.trials
        for k, eigs in enumerate(batch.eigenvalues):
            mask = batch.real_mask(k)
            pick = eigs[mask] if channel == "real_axis" else eigs[~mask]
            Z = edge_rescale(pick, batch.spec, side, window=np.inf)
            if channel == "real_axis":
                counts += np.histogram(Z.real, bins=grid.x_edges)[0]
            else:
                counts += np.histogram2d(Z.real, Z.imag, bins=[grid.x_edges, grid.y_edges])[0].astype(np.int64)
    multiplicity = 2 if batches and batches[0].spec.beta == 4 else 1
    return EdgeHistogram(grid, counts, trials, channel, multiplicity)


def bin_average(fn, grid: Grid, nodes=3):
    """Average of ``fn`` over every bin by tensor Gauss-Legendre."""
    x, w = leggauss(nodes)
    w = w / 2.0

    def points(edges):
        lo, hi = edges[:-1], edges[1:]
        return 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * x[None, :]

    px = points(grid.x_edges)
    if grid.y_edges is None:
        vals = np.array([[fn(v) for v in row] for row in px])
        return vals @ w
    py = points(grid.y_edges)
    out = np.empty(grid.shape)
    for i, row_x in enumerate(px):
        for j, row_y in enumerate(py):
            vals = np.array([[fn(complex(a, b)) for b in row_y] for a in row_x])
            out[i, j] = w @ vals @ w
    return out


@dataclass
class Comparison:
    model: np.ndarray
    z_scores: np.ndarray
    fraction_within: float


def compare(hist: EdgeHistogram, model, band=3.0, min_expected=0.0):
    """z-scores of the histogram against bin-averaged model densities.

    The Poisson standard deviation is taken from the expected count, so
    empty bins are scored correctly.  Bins with expected count below
    ``min_expected`` are excluded from the fraction.
    """
    model = np.asarray(model, dtype=float)
    expected = model * hist.normalization
    with np.errstate(invalid="ignore", divide="ignore"):
        z = np.where(expected > 0, (hist.counts - expected) / np.sqrt(np.maximum(expected, 1e-300)),
                     np.where(hist.counts > 0, np.inf, 0.0))
    keep = expected >= min_expected
    frac = float(np.mean(np.abs(z[keep]) <= band)) if np.any(keep) else 1.0
    return Comparison(model, z, frac)


def density_ai_b2_binned(grid: Grid, sigma, nodes=3):
    """Bin averages of the beta = 2 limit density on a 2-D grid.

    The Airy integral depends on Y as well as X, so the average is a full
    tensor Gauss-Legendre rule rather than a product of 1-D averages.
    """
    from .limits import density_ai_b2

    if grid.y_edges is None:
        raise UsageError("the complex-plane density needs a 2-D grid")
    return bin_average(lambda Z: density_ai_b2(Z, sigma), grid, nodes)


# ---------------------------------------------------------------------------
# Gumbel experiment


@dataclass
class GumbelFit:
    loc: float
    scale: float
    ks_statistic: float
    p_value: float
    samples: int


def gumbel_fit(values):
    """Maximum-likelihood Gumbel fit and Kolmogorov-Smirnov test against it."""
    values = np.asarray(values, dtype=float)
    loc, scale = stats.gumbel_r.fit(values)
    ks = stats.kstest(values, "gumbel_r", args=(loc, scale))
    return GumbelFit(float(loc), float(scale), float(ks.statistic), float(ks.pvalue), values.size)


def gumbel_experiment(spec: EnsembleSpec, trials, seed=0, workers=1, min_trials=10_000):
    """Fit a Gumbel law to the largest real part over ``trials`` draws at tau = 0."""
    if spec.tau != 0:
        raise DomainError("the Gumbel experiment runs at tau = 0")
    if trials < min_trials:
        raise DomainError(f"need at least {min_trials} trials, got {trials}")
    batch = sample_batch(spec, seed, trials, workers)
    return gumbel_fit(batch.max_real_parts())
