"""Monte Carlo distance estimators and limit-law verification harnesses.

Estimates the total-variation (L1) and Kullback-Leibler distances between
the scaled unit-interval ensemble and the Laguerre ensemble, evaluates the
linear-plus-quadratic spectral statistic and its centering shift, provides
quadrature references for the limiting distance values, and runs
Kolmogorov-Smirnov checks of the central limit behaviour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.linalg import eigvalsh_tridiagonal

from .densities import log_km_prime, log_lm_prime_batch_jacobi, log_lm_prime_batch_laguerre
from .ensembles import (
    EnsembleParams,
    Spectrum,
    batch_chunk_sizes,
    sample_jacobi_tridiagonal_batch,
    sample_laguerre_tridiagonal_batch,
    tridiagonal_power_traces,
)
from .numerics import (
    ConsistencyError,
    EstimatorError,
    KsReport,
    ParameterError,
    RngStream,
    SummaryStats,
    ks_test,
    normal_cdf,
)

__all__ = [
    "Estimate",
    "CltReport",
    "u_statistic",
    "u_shift",
    "tv_estimate",
    "kl_estimate",
    "limit_tv_reference",
    "clt_harness",
    "quadratic_clt_check",
    "pinsker_gap",
]

#: Per-draw log ratios are capped here before exponentiation so a single
#: pathological draw cannot overflow the running mean to infinity.
_EXP_CAP = 700.0

#: Unit-interval eigenvalues this close to 1 are clamped down and counted.
_UNIT_EDGE_WINDOW = 1e-15


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo scalar with its provenance.

    ``metric`` is one of ``"tv"``, ``"kl"``, ``"statistic"``.  ``shards``
    records the deterministic shard plan; ``n_clamped`` counts draws touched
    by the unit-edge clamping policy (KL only).
    """

    value: float
    std_error: float
    n_samples: int
    seed: int
    metric: str
    shards: int = 1
    n_clamped: int = 0


@dataclass(frozen=True)
class CltReport:
    """Result of comparing a centered spectral statistic to its normal limit."""

    replicates: int
    statistic_samples: SummaryStats
    target_mean: float
    target_variance: float
    ks: KsReport
    regime: str
    statistic: str


def u_statistic(params: EnsembleParams, mu) -> float:
    """Linear-plus-quadratic spectral statistic of a Laguerre spectrum.

    ``(r/(2*a2)) * sum(mu - 2*a1) - ((a2-r)/(8*a2^2)) * sum((mu - 2*a1)^2)``.
    """
    params.require_a2()
    v = mu.values if isinstance(mu, Spectrum) else np.asarray(mu, dtype=float)
    if v.shape != (params.m,):
        raise ParameterError(f"expected a length-{params.m} spectrum")
    a2, r = params.a2, params.r
    dev = v - 2.0 * params.a1
    return float((r / (2.0 * a2)) * dev.sum() - ((a2 - r) / (8.0 * a2**2)) * (dev * dev).sum())


def u_shift(params: EnsembleParams) -> float:
    """Centering shift ``(a2-r)*a1*m*r/(2*a2^2)``, the negated mean of the statistic."""
    params.require_a2()
    a2, r = params.a2, params.r
    return float((a2 - r) * params.a1 * params.m * r / (2.0 * a2**2))


def _shard_sizes(n: int, shards: int) -> list[int]:
    if shards < 1:
        raise ParameterError("shards must be a positive integer")
    if shards > n:
        raise ParameterError("shards must not exceed n_samples")
    base, extra = divmod(n, shards)
    return [base + (1 if k < extra else 0) for k in range(shards)]


def _require_stream(rng) -> RngStream:
    if not isinstance(rng, RngStream):
        raise TypeError("estimators require an RngStream so the seed can be recorded")
    return rng


def tv_estimate(
    params: EnsembleParams,
    n_samples: int,
    rng: RngStream,
    shards: int = 1,
    _log_ratio_fn=None,
) -> Estimate:
    """Total-variation (L1) distance estimate under the Laguerre measure.

    Averages ``|expm1(w)|`` over independent Laguerre draws, where ``w`` is
    the primed log density ratio; draws outside the scaled support contribute
    exactly 1.  ``_log_ratio_fn(params, size, gen) -> w`` is a testing hook
    replacing the ratio computation.
    """
    params.require_a2()
    rng = _require_stream(rng)
    if n_samples < 100:
        raise ParameterError("tv_estimate requires n_samples >= 100")
    sizes = _shard_sizes(n_samples, shards)
    lkp = log_km_prime(params)
    stats = SummaryStats()
    for shard_index, size in enumerate(sizes):
        gen = rng.substream(shard_index).generator()
        for chunk in batch_chunk_sizes(size, params.m):
            if _log_ratio_fn is not None:
                w = np.asarray(_log_ratio_fn(params, chunk, gen), dtype=float)
            else:
                diag, off = sample_laguerre_tridiagonal_batch(params, chunk, gen)
                llp, _ = log_lm_prime_batch_laguerre(params, diag, off)
                w = lkp + llp
            stats.add_array(np.abs(np.expm1(np.minimum(w, _EXP_CAP))))
    return Estimate(
        value=stats.mean,
        std_error=stats.std_error,
        n_samples=n_samples,
        seed=rng.seed,
        metric="tv",
        shards=shards,
    )


def _kl_fallback_row(params: EnsembleParams, diag_row, off_row) -> tuple[float, bool]:
    """Eigenvalue-route KL contribution for a draw whose pivot route failed.

    Applies the unit-edge policy: eigenvalues within the clamping window of 1
    are pulled to ``1 - 1e-15`` and the draw is flagged; larger overshoot is
    a consistency error.
    """
    if params.m == 1:
        lam = np.asarray(diag_row, dtype=float)
    else:
        lam = eigvalsh_tridiagonal(np.asarray(diag_row, float), np.asarray(off_row, float))
    if np.any(lam > 1.0 + 1e-12) or np.any(lam < -1e-12):
        raise ConsistencyError("unit-interval eigenvalue outside [0, 1] beyond the clamping tolerance")
    clamped = bool(np.any(lam >= 1.0 - _UNIT_EDGE_WINDOW))
    lam = np.clip(lam, 0.0, 1.0 - _UNIT_EDGE_WINDOW)
    value = params.a * lam.sum() + (params.a2 - params.r) * (
        params.m * np.log1p(params.a1 / params.a2) + np.sum(np.log1p(-lam))
    )
    return float(value), clamped


def kl_estimate(
    params: EnsembleParams,
    n_samples: int,
    rng: RngStream,
    shards: int = 1,
) -> Estimate:
    """Kullback-Leibler distance estimate under the unit-interval measure.

    Averages the log density ratio at the scaled draw over independent
    unit-interval spectra.  Draws with an eigenvalue at the upper edge are
    clamped and counted; more than 0.1% of them aborts the estimate.
    """
    params.require_a2()
    rng = _require_stream(rng)
    if n_samples < 100:
        raise ParameterError("kl_estimate requires n_samples >= 100")
    sizes = _shard_sizes(n_samples, shards)
    lkp = log_km_prime(params)
    stats = SummaryStats()
    n_clamped = 0
    for shard_index, size in enumerate(sizes):
        gen = rng.substream(shard_index).generator()
        for chunk in batch_chunk_sizes(size, params.m):
            diag, off = sample_jacobi_tridiagonal_batch(params, chunk, gen)
            llp, good = log_lm_prime_batch_jacobi(params, diag, off)
            if not np.all(good):
                llp = llp.copy()
                for row in np.flatnonzero(~good):
                    value, clamped = _kl_fallback_row(params, diag[row], off[row])
                    llp[row] = value
                    n_clamped += int(clamped)
            stats.add_array(lkp + llp)
    if n_clamped > 0.001 * n_samples:
        raise EstimatorError(
            f"{n_clamped} of {n_samples} draws needed unit-edge clamping (limit is 0.1%)"
        )
    return Estimate(
        value=stats.mean,
        std_error=stats.std_error,
        n_samples=n_samples,
        seed=rng.seed,
        metric="kl",
        shards=shards,
        n_clamped=n_clamped,
    )


def limit_tv_reference(beta: float, sigma: float) -> float:
    """Limiting TV value ``E|e^xi - 1|`` for ``xi ~ N(-s^2/2, s^2)``, ``s^2 = beta*sigma^2/4``.

    Computed by adaptive quadrature split at the integrand's kink.  (The
    closed form ``2*(2*Phi(s/2) - 1)`` is pinned against this quadrature in
    the test suite.)
    """
    if beta <= 0.0:
        raise ParameterError("limit_tv_reference requires beta > 0")
    if sigma < 0.0:
        raise ParameterError("limit_tv_reference requires sigma >= 0")
    if sigma == 0.0:
        return 0.0
    s2 = beta * sigma * sigma / 4.0
    s = math.sqrt(s2)

    def phi(z: float) -> float:
        return math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)

    def integrand(z: float) -> float:
        # |exp(-s^2/2 + s*z) - 1| * phi(z) rewritten overflow-free.
        return abs(phi(z - s) - phi(z))

    kink = s / 2.0
    left, _ = integrate.quad(integrand, -np.inf, kink)
    right, _ = integrate.quad(integrand, kink, np.inf)
    return float(left + right)


def pinsker_gap(tv: Estimate, kl: Estimate) -> float:
    """Slack in ``tv^2 <= 2*kl`` after widening by four propagated standard errors.

    Nonnegative when the pair of estimates is consistent with the inequality.
    """
    propagated = math.sqrt((2.0 * abs(tv.value) * tv.std_error) ** 2 + (2.0 * kl.std_error) ** 2)
    return 2.0 * kl.value + 4.0 * propagated - tv.value**2


def _regime_proxies(params: EnsembleParams) -> tuple[float, float, float]:
    sigma = params.a1 * params.m / params.a2
    x = params.a1 / math.sqrt(params.a2)
    y = params.m / math.sqrt(params.a2)
    return sigma, x, y


def clt_harness(
    params: EnsembleParams,
    regime: str,
    replicates: int,
    rng: RngStream,
    statistic: str = "u",
) -> CltReport:
    """KS check of a centered spectral statistic against its normal limit.

    ``statistic="u"`` tests the linear-plus-quadratic statistic plus its
    centering shift against ``N(0, beta*sigma^2/4)``.
    ``statistic="log_lm_prime"`` tests the primed log sample factor minus
    ``a1*m`` plus the shift; its limit mean is 0 for regime "A2" and
    ``-beta^2*x*y^3/12`` for regime "A3".  Proxies: ``sigma = a1*m/a2``,
    ``x = a1/sqrt(a2)``, ``y = m/sqrt(a2)``.
    """
    params.require_a2()
    rng = _require_stream(rng)
    if regime not in ("A2", "A3"):
        raise ParameterError("regime must be 'A2' or 'A3'")
    if statistic not in ("u", "log_lm_prime"):
        raise ParameterError("statistic must be 'u' or 'log_lm_prime'")
    if replicates < 500:
        raise ParameterError("clt_harness requires replicates >= 500 for KS power")
    sigma, x, y = _regime_proxies(params)
    target_var = params.beta * sigma * sigma / 4.0
    if statistic == "u":
        target_mean = 0.0
    else:
        target_mean = 0.0 if regime == "A2" else -params.beta**2 * x * y**3 / 12.0
    shift = u_shift(params)
    gen = rng.generator()
    values = np.empty(replicates)
    pos = 0
    for chunk in batch_chunk_sizes(replicates, params.m):
        diag, off = sample_laguerre_tridiagonal_batch(params, chunk, gen)
        if statistic == "u":
            t1, t2, _ = tridiagonal_power_traces(diag, off, 2.0 * params.a1)
            a2, r = params.a2, params.r
            vals = (r / (2.0 * a2)) * t1 - ((a2 - r) / (8.0 * a2**2)) * t2 + shift
        else:
            llp, _ = log_lm_prime_batch_laguerre(params, diag, off)
            vals = llp - params.a1 * params.m + shift
        values[pos : pos + chunk] = vals
        pos += chunk
    sd = math.sqrt(target_var)
    ks = ks_test(values, lambda t: normal_cdf((t - target_mean) / sd))
    stats = SummaryStats()
    stats.add_array(values)
    return CltReport(
        replicates=replicates,
        statistic_samples=stats,
        target_mean=target_mean,
        target_variance=target_var,
        ks=ks,
        regime=regime,
        statistic=statistic,
    )


def quadratic_clt_check(params: EnsembleParams, replicates: int, rng: RngStream) -> CltReport:
    """KS check of the centered quadratic spectral statistic alone.

    ``((a2-r)/(8*a2^2)) * sum((mu-2a1)^2)``, centered at its exact mean, is
    compared to ``N(0, (beta*sigma^2 + beta^2*x*y^3)/4)``.
    """
    params.require_a2()
    rng = _require_stream(rng)
    if replicates < 500:
        raise ParameterError("quadratic_clt_check requires replicates >= 500 for KS power")
    sigma, x, y = _regime_proxies(params)
    target_var = (params.beta * sigma * sigma + params.beta**2 * x * y**3) / 4.0
    center = u_shift(params)  # equals (a2-r) * E sum((mu-2a1)^2) / (8*a2^2)
    gen = rng.generator()
    values = np.empty(replicates)
    pos = 0
    coeff = (params.a2 - params.r) / (8.0 * params.a2**2)
    for chunk in batch_chunk_sizes(replicates, params.m):
        diag, off = sample_laguerre_tridiagonal_batch(params, chunk, gen)
        _, t2, _ = tridiagonal_power_traces(diag, off, 2.0 * params.a1)
        values[pos : pos + chunk] = coeff * t2 - center
        pos += chunk
    sd = math.sqrt(target_var)
    ks = ks_test(values, lambda t: normal_cdf(t / sd))
    stats = SummaryStats()
    stats.add_array(values)
    return CltReport(
        replicates=replicates,
        statistic_samples=stats,
        target_mean=0.0,
        target_variance=target_var,
        ks=ks,
        regime="A3",
        statistic="quadratic",
    )
