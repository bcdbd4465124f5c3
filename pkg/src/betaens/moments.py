"""Closed-form moment formulas and their sampling/trace oracles.

Chi-square moment selectors, exact statistics of the Laguerre spectral sums,
leading-order moments of the unit-interval ensemble, the bookkeeping
sequences used by the trace identities, and the spectral-edge prediction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import Estimate
from .ensembles import (
    EnsembleParams,
    LaguerreBidiagonal,
    batch_chunk_sizes,
    eigenvalues,
    gram_tridiagonal,
    sample_laguerre_tridiagonal_batch,
    tridiagonal_power_traces,
)
from .numerics import ConsistencyError, ParameterError, RngStream, SummaryStats

__all__ = [
    "LaguerreStats",
    "JacobiMomentEstimates",
    "AuxSequences",
    "chi_moment",
    "laguerre_exact_stats",
    "jacobi_moment_estimates",
    "aux_sequences",
    "trace_power_oracle",
    "cubic_variance_probe",
    "spectral_edge_prediction",
]


@dataclass(frozen=True)
class LaguerreStats:
    """Exact statistics of the linear/quadratic/cubic Laguerre spectral sums."""

    var_sum: float
    e_sq: float
    var_sq: float
    cov_lin_sq: float
    e_cube: float


@dataclass(frozen=True)
class JacobiMomentEstimates:
    """Leading-order expected power sums of the unit-interval spectrum."""

    s1: float
    s2: float
    s3: float


@dataclass(frozen=True)
class AuxSequences:
    """Bookkeeping vectors behind the trace identities.

    ``b_1 = 0`` and ``b_i = beta*m - 2*beta*(i-1)`` for i >= 2; ``z_dof`` are
    the chi-square degrees of freedom ``2*a1 + b_i`` of the tridiagonal's
    diagonal entries.
    """

    b: np.ndarray
    z_dof: np.ndarray


_CHI_SELECTORS = ("raw", "central2", "central3", "central4", "var_sq_shifted", "var_central_sq")


def chi_moment(dof: float, which: str, k: int | None = None) -> float:
    """Closed-form chi-square moments for ``X ~ chi^2_n``.

    Selectors: ``raw`` (E X^k, needs ``k``), ``central2`` (= 2n),
    ``central3`` (= 8n), ``central4`` (= 12n(n+4)), ``var_sq_shifted``
    (Var(X^2) = 8n(n+2)(n+3)), and ``var_central_sq``
    (Var((X-n)^2) = 8n(n+6)).
    """
    n = float(dof)
    if not n > 0.0:
        raise ParameterError("chi_moment requires dof > 0")
    if which == "raw":
        if k is None or int(k) != k or k < 1:
            raise ParameterError("raw chi-square moment requires an integer k >= 1")
        return float(np.prod(n + 2.0 * np.arange(int(k), dtype=float)))
    if which == "central2":
        return 2.0 * n
    if which == "central3":
        return 8.0 * n
    if which == "central4":
        return 12.0 * n * (n + 4.0)
    if which == "var_sq_shifted":
        return 8.0 * n * (n + 2.0) * (n + 3.0)
    if which == "var_central_sq":
        return 8.0 * n * (n + 6.0)
    raise ParameterError(f"unknown chi-square moment selector {which!r}; expected one of {_CHI_SELECTORS}")


def laguerre_exact_stats(params: EnsembleParams) -> LaguerreStats:
    """Exact moments of the Laguerre spectral sums.

    All five formulas are evaluated literally; at m = 1 every (m-1) factor
    vanishes and the values coincide with the chi-square closed forms at
    n = 2*a1.
    """
    beta, m, a1, r = params.beta, params.m, params.a1, params.r
    return LaguerreStats(
        var_sum=4.0 * a1 * m,
        e_sq=4.0 * a1 * m * r,
        var_sq=(
            16.0 * beta * a1 * m * (m - 1) * (a1 + 5.0)
            + 8.0 * beta**2 * a1 * m * (m - 1) * (2 * m - 3)
            + 32.0 * a1 * m * (a1 + 3.0)
        ),
        cov_lin_sq=16.0 * a1 * m * r,
        e_cube=(
            2.0 * beta**2 * a1 * m * (m - 1) * (m - 2)
            + 12.0 * beta * a1 * m * (m - 1)
            + 16.0 * a1 * m
        ),
    )


def jacobi_moment_estimates(params: EnsembleParams) -> JacobiMomentEstimates:
    """Leading-order expectations of the first three unit-interval power sums.

    Valid as approximations when ``a1*m`` is small relative to ``a2``; the
    dropped remainders are not modeled.
    """
    params.require_a2()
    m, a1, eta, a = params.m, params.a1, params.eta, params.a
    return JacobiMomentEstimates(
        s1=a1 * m / a,
        s2=(a1**2 * m + eta * a1 * m**2) / a**2,
        s3=(a1**3 * m + 3.0 * eta * a1**2 * m**2 + eta**2 * a1 * m**3) / a**3,
    )


def aux_sequences(params: EnsembleParams) -> AuxSequences:
    """The b-sequence and the diagonal chi-square dof vector ``2*a1 + b``."""
    m, beta = params.m, params.beta
    b = beta * m - 2.0 * beta * np.arange(m, dtype=float)
    if m >= 1:
        b[0] = 0.0
    return AuxSequences(b=b, z_dof=2.0 * params.a1 + b)


def trace_power_oracle(bid: LaguerreBidiagonal, k: int, shift: float = 0.0) -> float:
    """tr((Gram - shift*I)^k) computed two independent ways.

    Route (a) goes through the eigensolver; route (b) uses the bidiagonal
    entry formulas.  The two must agree to 1e-9 relative, otherwise a
    :class:`ConsistencyError` is raised; route (a) is returned.
    """
    if k not in (1, 2, 3):
        raise ParameterError("trace_power_oracle supports k in {1, 2, 3}")
    t = gram_tridiagonal(bid)
    eig = eigenvalues(t)
    via_eig = float(np.sum((eig - shift) ** k))
    traces = tridiagonal_power_traces(t.diag, t.offdiag, shift)
    via_entries = float(traces[k - 1][0])
    if abs(via_eig - via_entries) > 1e-9 * max(1.0, abs(via_eig)):
        raise ConsistencyError(
            f"trace power mismatch (k={k}): eigenvalue route {via_eig!r} vs entry route {via_entries!r}"
        )
    return via_eig


def cubic_variance_probe(params: EnsembleParams, n_samples: int, rng: RngStream) -> Estimate:
    """Monte Carlo variance of the cubic Laguerre spectral sum.

    Estimates Var(sum (mu_i - 2*a1)^3) with a fourth-moment standard error;
    intended for verifying that the ratio to m^7 stays bounded along
    schedules where a1 and m grow proportionally.
    """
    if not isinstance(rng, RngStream):
        raise TypeError("cubic_variance_probe requires an RngStream for provenance")
    if n_samples < 100:
        raise ParameterError("cubic_variance_probe requires n_samples >= 100")
    gen = rng.generator()
    shift = 2.0 * params.a1
    stats = SummaryStats()
    for size in batch_chunk_sizes(n_samples, params.m):
        diag, off = sample_laguerre_tridiagonal_batch(params, size, gen)
        _, _, t3 = tridiagonal_power_traces(diag, off, shift)
        stats.add_array(t3)
    return Estimate(
        value=stats.variance,
        std_error=stats.variance_std_error(),
        n_samples=n_samples,
        seed=rng.seed,
        metric="statistic",
    )


def spectral_edge_prediction(params: EnsembleParams) -> tuple[float, float]:
    """Predicted extreme-eigenvalue locations of the Laguerre spectrum.

    With ``gamma = beta*m/(2*a1)`` (must lie in (0, 1]), the lower and upper
    edges are ``m*beta*(1 -/+ sqrt(1/gamma))^2``.
    """
    gamma = params.beta * params.m / (2.0 * params.a1)
    if gamma > 1.0:
        raise ParameterError(f"gamma = beta*m/(2*a1) must lie in (0, 1], got {gamma}")
    root = np.sqrt(1.0 / gamma)
    low = params.m * params.beta * (1.0 - root) ** 2
    high = params.m * params.beta * (1.0 + root) ** 2
    return float(low), float(high)
