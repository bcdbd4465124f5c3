"""Shared numerical primitives.

Special functions, reproducible random variate generation, streaming moment
accumulation, and a one-sample Kolmogorov-Smirnov test.  Everything else in
the package builds on this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "ParameterError",
    "ConsistencyError",
    "EstimatorError",
    "RngStream",
    "SummaryStats",
    "KsReport",
    "log_gamma",
    "normal_cdf",
    "sample_chi_square",
    "sample_beta",
    "ks_test",
    "accumulate",
]


class ParameterError(ValueError):
    """An input violates a documented parameter constraint."""


class ConsistencyError(RuntimeError):
    """An internal cross-check failed (two routes to a value disagree)."""


class EstimatorError(RuntimeError):
    """A Monte Carlo estimator hit a data condition it refuses to average over."""


#: Number of shard slots reserved per base stream by :meth:`RngStream.substream`.
SHARD_SLOTS = 1 << 16


@dataclass(frozen=True)
class RngStream:
    """Specification of a reproducible random stream.

    The stream is keyed by ``(seed, stream_index)`` and realized by a
    counter-based Philox generator, so identical keys yield bit-identical
    variate sequences while distinct stream indices give statistically
    independent streams.  Call :meth:`generator` to materialize a stateful
    ``numpy.random.Generator``; materializing twice restarts the sequence.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise ParameterError("seed must be an unsigned 64-bit integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must lie in [0, 2^64)")
        if not isinstance(self.stream_index, (int, np.integer)) or self.stream_index < 0:
            raise ParameterError("stream_index must be a nonnegative integer")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        key = (int(self.stream_index) << 64) + int(self.seed)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "RngStream":
        """Derived stream for shard ``index`` (0 <= index < SHARD_SLOTS)."""
        if not 0 <= index < SHARD_SLOTS:
            raise ParameterError(f"substream index must lie in [0, {SHARD_SLOTS})")
        return RngStream(self.seed, self.stream_index * SHARD_SLOTS + index)


def _as_generator(rng: "RngStream | np.random.Generator") -> np.random.Generator:
    """Coerce an RngStream or Generator to a Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy.random.Generator")


@dataclass
class SummaryStats:
    """Streaming accumulator of mean and 2nd-4th central moment sums.

    ``m2``, ``m3``, ``m4`` are sums of centered powers (not normalized), so
    two accumulators can be merged exactly; merging is associative and
    order-independent up to floating-point roundoff.
    """

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0

    @property
    def variance(self) -> float:
        """Unbiased sample variance (0 while fewer than two values)."""
        if self.n < 2:
            return 0.0
        return max(self.m2 / (self.n - 1), 0.0)

    @property
    def std_error(self) -> float:
        """Standard error of the mean, sqrt(variance / n)."""
        if self.n < 1:
            return 0.0
        return math.sqrt(self.variance / self.n)

    def central_moment(self, k: int) -> float:
        """Plug-in k-th central moment (k in {2, 3, 4})."""
        if k not in (2, 3, 4):
            raise ParameterError("central_moment supports k in {2, 3, 4}")
        if self.n == 0:
            return 0.0
        return (self.m2, self.m3, self.m4)[k - 2] / self.n

    def variance_std_error(self) -> float:
        """Asymptotic standard error of the unbiased sample variance.

        Uses the fourth-moment formula Var(s^2) ~ (mu4 - s^4 (n-3)/(n-1)) / n.
        """
        if self.n < 4:
            return 0.0
        n = self.n
        mu4 = self.central_moment(4)
        var = (mu4 - self.variance**2 * (n - 3) / (n - 1)) / n
        return math.sqrt(max(var, 0.0))

    def add(self, value: float) -> None:
        """Accumulate one value."""
        self.merge_in(1, float(value), 0.0, 0.0, 0.0)

    def add_array(self, values: np.ndarray) -> None:
        """Accumulate a batch of values at once."""
        x = np.asarray(values, dtype=float).ravel()
        if x.size == 0:
            return
        mean = float(x.mean())
        d = x - mean
        d2 = d * d
        self.merge_in(x.size, mean, float(d2.sum()), float((d2 * d).sum()), float((d2 * d2).sum()))

    def merge_in(self, n_b: int, mean_b: float, m2_b: float, m3_b: float, m4_b: float) -> None:
        """Merge another accumulator's raw state into this one."""
        if n_b == 0:
            return
        n_a, mean_a = self.n, self.mean
        m2_a, m3_a, m4_a = self.m2, self.m3, self.m4
        n = n_a + n_b
        delta = mean_b - mean_a
        self.n = n
        self.mean = mean_a + delta * n_b / n
        self.m2 = m2_a + m2_b + delta**2 * n_a * n_b / n
        self.m3 = (
            m3_a
            + m3_b
            + delta**3 * n_a * n_b * (n_a - n_b) / n**2
            + 3.0 * delta * (n_a * m2_b - n_b * m2_a) / n
        )
        self.m4 = (
            m4_a
            + m4_b
            + delta**4 * n_a * n_b * (n_a**2 - n_a * n_b + n_b**2) / n**3
            + 6.0 * delta**2 * (n_a**2 * m2_b + n_b**2 * m2_a) / n**2
            + 4.0 * delta * (n_a * m3_b - n_b * m3_a) / n
        )

    def merge(self, other: "SummaryStats") -> "SummaryStats":
        """Return a new accumulator equal to this one combined with ``other``."""
        out = SummaryStats(self.n, self.mean, self.m2, self.m3, self.m4)
        out.merge_in(other.n, other.mean, other.m2, other.m3, other.m4)
        return out


def accumulate(values, into: SummaryStats | None = None) -> SummaryStats:
    """Accumulate an iterable of reals into a :class:`SummaryStats`.

    One-pass and numerically stable; pass ``into`` to extend an existing
    accumulator (useful for sharded reductions).
    """
    stats = into if into is not None else SummaryStats()
    arr = values if isinstance(values, np.ndarray) else np.fromiter((float(v) for v in values), dtype=float)
    stats.add_array(arr)
    return stats


@dataclass(frozen=True)
class KsReport:
    """Result of a one-sample Kolmogorov-Smirnov test."""

    statistic_d: float
    p_value: float
    n: int


def log_gamma(x):
    """Natural log of the Gamma function for positive arguments.

    Accepts scalars or arrays; raises :class:`ParameterError` off-domain.
    """
    arr = np.asarray(x, dtype=float)
    if arr.size == 0 or np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ParameterError("log_gamma requires x > 0")
    out = special.gammaln(arr)
    return float(out) if arr.ndim == 0 else out


def normal_cdf(x):
    """Standard normal distribution function Phi(x) (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    out = special.ndtr(arr)
    return float(out) if arr.ndim == 0 else out


def sample_chi_square(dof, rng, size=None):
    """Chi-square variates with arbitrary positive (non-integer) dof.

    Implemented as ``2 * Gamma(shape=dof/2, scale=1)``.  ``dof`` may be an
    array, in which case it broadcasts against ``size``.
    """
    d = np.asarray(dof, dtype=float)
    if d.size == 0 or np.any(~np.isfinite(d)) or np.any(d <= 0.0):
        raise ParameterError("sample_chi_square requires dof > 0")
    gen = _as_generator(rng)
    scalar = size is None and d.ndim == 0
    shape = (1,) if scalar else (d.shape if size is None else size)
    out = 2.0 * gen.standard_gamma(d / 2.0, size=shape)
    return float(out[0]) if scalar else out


def sample_beta(alpha, beta_param, rng, size=None):
    """Beta(alpha, beta_param) variates strictly inside (0, 1).

    Realized as ``G1 / (G1 + G2)`` with independent Gamma variates; draws
    rounded onto an endpoint (possible only for very small shapes) are
    regenerated.  Parameters may be arrays broadcasting against ``size``.
    """
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta_param, dtype=float)
    for arr in (a, b):
        if arr.size == 0 or np.any(~np.isfinite(arr)) or np.any(arr <= 0.0):
            raise ParameterError("sample_beta requires alpha > 0 and beta_param > 0")
    gen = _as_generator(rng)
    scalar = size is None and a.ndim == 0 and b.ndim == 0
    shape = (1,) if scalar else (np.broadcast_shapes(a.shape, b.shape) if size is None else size)
    g1 = gen.standard_gamma(a, size=shape)
    g2 = gen.standard_gamma(b, size=shape)
    out = g1 / (g1 + g2)
    bad = (out <= 0.0) | (out >= 1.0) | ~np.isfinite(out)
    while np.any(bad):
        aa = np.broadcast_to(a, shape)[bad]
        bb = np.broadcast_to(b, shape)[bad]
        r1 = gen.standard_gamma(aa)
        r2 = gen.standard_gamma(bb)
        out[bad] = r1 / (r1 + r2)
        bad = (out <= 0.0) | (out >= 1.0) | ~np.isfinite(out)
    return float(out[0]) if scalar else out


def ks_test(samples, cdf) -> KsReport:
    """One-sample Kolmogorov-Smirnov test against a continuous cdf.

    The p-value uses the asymptotic Kolmogorov distribution of sqrt(n) * D,
    so samples of fewer than 100 points are rejected.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ParameterError("ks_test requires a nonempty sample")
    if n < 100:
        raise ParameterError("ks_test requires at least 100 samples (asymptotic p-value)")
    try:
        f = np.asarray(cdf(x), dtype=float)
        if f.shape != x.shape:
            raise TypeError
    except TypeError:
        f = np.array([float(cdf(v)) for v in x])
    grid = np.arange(1, n + 1, dtype=float) / n
    d_plus = float(np.max(grid - f))
    d_minus = float(np.max(f - (grid - 1.0 / n)))
    d = min(max(d_plus, d_minus, 0.0), 1.0)
    p = float(special.kolmogorov(math.sqrt(n) * d))
    return KsReport(statistic_d=d, p_value=min(max(p, 0.0), 1.0), n=n)
