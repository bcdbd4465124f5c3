"""Exact log-densities, normalizing constants, and density-ratio terms.

Everything is evaluated in log space: the normalizing constants reach
Gamma(1e8)-scale magnitudes, so raw Gamma values are never formed.  The
sample-dependent ratio factor is available in two algebraically equivalent
arrangements; the "primed" arrangement keeps every per-draw log bounded and
is what the Monte Carlo estimators consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import EnsembleParams
from .numerics import ParameterError, log_gamma

__all__ = [
    "LogRatioTerms",
    "log_cj",
    "log_cl",
    "log_density_laguerre",
    "log_density_jacobi",
    "log_km_exact",
    "log_km_asymptotic",
    "log_km_prime",
    "log_lm",
    "log_ratio_terms",
    "ratio_transfer",
    "log_lm_prime_batch_laguerre",
    "log_lm_prime_batch_jacobi",
]


@dataclass(frozen=True)
class LogRatioTerms:
    """The four log ratio factors at one sample point, plus support flag.

    ``log_km + log_lm`` and ``log_km_prime + log_lm_prime`` agree whenever
    the point is inside the support; off support both sample-dependent logs
    are ``-inf``.
    """

    log_km: float
    log_lm: float
    log_km_prime: float
    log_lm_prime: float
    in_support: bool


def _check_positive_gamma_args(*arrays) -> None:
    for arr in arrays:
        if np.any(np.asarray(arr) <= 0.0):
            raise ParameterError("normalizing constant requires all Gamma arguments positive")


def log_cj(params: EnsembleParams) -> float:
    """Log normalizing constant of the unit-interval (Jacobi) ensemble."""
    params.require_a2()
    eta, m = params.eta, params.m
    j = np.arange(1, m + 1, dtype=float)
    gap = eta * (m - j)
    _check_positive_gamma_args(params.a - gap, params.a1 - gap, params.a2 - gap)
    total = (
        m * log_gamma(1.0 + eta)
        + np.sum(log_gamma(params.a - gap))
        - np.sum(log_gamma(1.0 + eta * j))
        - np.sum(log_gamma(params.a1 - gap))
        - np.sum(log_gamma(params.a2 - gap))
    )
    return float(total)


def log_cl(params: EnsembleParams) -> float:
    """Log normalizing constant of the nonnegative-axis (Laguerre) ensemble."""
    eta, m = params.eta, params.m
    j = np.arange(1, m + 1, dtype=float)
    gap = eta * (m - j)
    _check_positive_gamma_args(params.a1 - gap)
    total = (
        -m * params.a1 * np.log(2.0)
        + m * log_gamma(1.0 + eta)
        - np.sum(log_gamma(1.0 + eta * j))
        - np.sum(log_gamma(params.a1 - gap))
    )
    return float(total)


def _log_vandermonde(v: np.ndarray, beta: float) -> float:
    """beta * sum of log pairwise gaps; -inf when any two entries tie."""
    if v.size < 2:
        return 0.0
    diff = np.abs(v[:, None] - v[None, :])
    iu = np.triu_indices(v.size, k=1)
    gaps = diff[iu]
    if np.any(gaps == 0.0):
        return -np.inf
    return float(beta * np.sum(np.log(gaps)))


def log_density_laguerre(params: EnsembleParams, v) -> float:
    """Log joint eigenvalue density of the Laguerre ensemble at ``v``.

    Returns ``-inf`` off the open support (any entry <= 0 or tied pair).
    """
    x = np.asarray(v, dtype=float)
    if x.shape != (params.m,):
        raise ParameterError(f"expected a length-{params.m} vector")
    if np.any(x <= 0.0):
        return -np.inf
    rep = _log_vandermonde(x, params.beta)
    if rep == -np.inf:
        return -np.inf
    return float(
        log_cl(params) + rep + (params.a1 - params.r) * np.sum(np.log(x)) - 0.5 * np.sum(x)
    )


def log_density_jacobi(params: EnsembleParams, v) -> float:
    """Log joint eigenvalue density of the unit-interval ensemble at ``v``.

    The support is taken as the open cube (0, 1)^m; boundary or outside
    points return ``-inf``.
    """
    params.require_a2()
    x = np.asarray(v, dtype=float)
    if x.shape != (params.m,):
        raise ParameterError(f"expected a length-{params.m} vector")
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        return -np.inf
    rep = _log_vandermonde(x, params.beta)
    if rep == -np.inf:
        return -np.inf
    return float(
        log_cj(params)
        + rep
        + (params.a1 - params.r) * np.sum(np.log(x))
        + (params.a2 - params.r) * np.sum(np.log1p(-x))
    )


#: Above this lower bound on the smaller Gamma argument, the constant ratio
#: factor is summed in a rearranged Stirling-difference form.  The direct
#: Gamma-sum loses ~m*|log_gamma(a2)|*eps absolute accuracy to cancellation
#: (e.g. ~1e-3 at m~4000, a2~1e8); the rearranged form keeps every summand
#: at unit scale and stays accurate to ~1e-8 there.
_STIRLING_DIFF_MIN_ARG = 1e4


def _stirling_tail(z: np.ndarray) -> np.ndarray:
    """Correction series of log Gamma beyond the elementary Stirling terms."""
    inv = 1.0 / z
    inv2 = inv * inv
    return inv / 12.0 - inv * inv2 / 360.0 + inv * inv2 * inv2 / 1260.0


def log_km_exact(params: EnsembleParams) -> float:
    """Exact log of the constant ratio factor.

    ``-m*a1*log(a) + sum_i [log_gamma(a - eta*i) - log_gamma(a2 - eta*i)]``
    over ``i = 0..m-1``.  When all Gamma arguments are large the sum is
    evaluated in a cancellation-free arrangement; the result is the same
    quantity either way.
    """
    params.require_a2()
    i = np.arange(params.m, dtype=float)
    z1 = params.a - params.eta * i
    z2 = params.a2 - params.eta * i
    _check_positive_gamma_args(z1, z2)
    if np.min(z2) >= _STIRLING_DIFF_MIN_ARG:
        # Per-index difference minus a1*log(a), with every big magnitude
        # cancelled analytically:
        #   (z2 - 1/2)*log1p(a1/z2) + a1*log1p(-eta*i/a) - a1 + tail terms.
        terms = (
            (z2 - 0.5) * np.log1p(params.a1 / z2)
            + params.a1 * np.log1p(-params.eta * i / params.a)
            - params.a1
            + _stirling_tail(z1)
            - _stirling_tail(z2)
        )
        return math.fsum(terms.tolist())
    total = (
        -params.m * params.a1 * np.log(params.a)
        + np.sum(log_gamma(z1))
        - np.sum(log_gamma(z2))
    )
    return float(total)


def log_km_asymptotic(params: EnsembleParams) -> float:
    """Stirling approximation of the constant ratio factor's log.

    Accurate when ``a1*m/a2`` stays bounded and ``a2`` is large; the caller
    owns that regime judgement.
    """
    params.require_a2()
    m, a1, a2 = params.m, params.a1, params.a2
    return float(
        -a1 * m
        + m * (a2 - params.r / 2.0) * np.log1p(a1 / a2)
        - params.beta**2 * a1 * m**3 / (24.0 * params.a**2)
    )


def ratio_transfer(params: EnsembleParams) -> float:
    """Log of the constant transferred between the plain and primed factors.

    Equals ``m*(a2-r)*log(1+a1/a2)``; the primed constant factor is the plain
    one minus this, and the primed sample factor is the plain one plus it.
    """
    params.require_a2()
    return float(params.m * (params.a2 - params.r) * np.log1p(params.a1 / params.a2))


def log_km_prime(params: EnsembleParams) -> float:
    """Log of the rebalanced (primed) constant ratio factor."""
    return log_km_exact(params) - ratio_transfer(params)


def log_lm(params: EnsembleParams, v) -> float:
    """Log of the sample-dependent ratio factor at ``v``.

    ``0.5*sum(v) + (a2-r)*sum(log(1 - v/(2a)))`` when ``max(v) < 2a``, else
    ``-inf``.  Small-argument logs are evaluated stably because the
    ``(a2-r)`` multiplier amplifies any relative log error by ~a2.
    """
    params.require_a2()
    x = np.asarray(v, dtype=float)
    if x.shape != (params.m,):
        raise ParameterError(f"expected a length-{params.m} vector")
    two_a = 2.0 * params.a
    if np.max(x) >= two_a:
        return -np.inf
    return float(0.5 * np.sum(x) + (params.a2 - params.r) * np.sum(np.log1p(-x / two_a)))


def _log_lm_prime_vector(params: EnsembleParams, v: np.ndarray) -> float:
    """Primed sample factor via the combined stable form (on-support input)."""
    return float(
        0.5 * np.sum(v)
        + (params.a2 - params.r) * np.sum(np.log1p((2.0 * params.a1 - v) / (2.0 * params.a2)))
    )


def log_ratio_terms(params: EnsembleParams, v) -> LogRatioTerms:
    """All four log ratio factors at ``v``.

    The plain pair uses the direct forms; the primed pair uses the combined
    small-argument form together with the analytic transfer constant, so the
    identity ``log_km + log_lm == log_km_prime + log_lm_prime`` holds to
    ~1e-8 absolute on support.
    """
    params.require_a2()
    x = np.asarray(v, dtype=float)
    lkm = log_km_exact(params)
    transfer = ratio_transfer(params)
    lkm_p = lkm - transfer
    if x.size and np.max(x) >= 2.0 * params.a:
        return LogRatioTerms(lkm, -np.inf, lkm_p, -np.inf, False)
    llm = log_lm(params, x)
    llm_p = _log_lm_prime_vector(params, x)
    return LogRatioTerms(lkm, llm, lkm_p, llm_p, True)


def log_lm_prime_batch_laguerre(
    params: EnsembleParams, diag: np.ndarray, offdiag: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Primed sample factor for a batch of spectra given as tridiagonals.

    Avoids eigendecomposition: with T the Gram tridiagonal of a draw and
    pivots ``q_i = 2a - d_i - e_{i-1}^2 / q_{i-1}`` of the shifted
    factorization of ``2a*I - T``, ``prod q_i = prod (2a - mu_i)``, so
    ``sum log1p((2a1 - mu_i)/(2a2)) = sum log(q_i / (2a2))``.  Pivots are
    tracked as ``u_i = q_i - 2a2`` for accuracy at large ``a2``.

    Returns ``(log_lm_prime, in_support)`` arrays of length n; off-support
    rows (some ``mu_i >= 2a``, detected as a nonpositive pivot) get ``-inf``.
    """
    params.require_a2()
    d = np.asarray(diag, dtype=float)
    e = np.asarray(offdiag, dtype=float)
    n, m = d.shape
    two_a1 = 2.0 * params.a1
    two_a2 = 2.0 * params.a2
    u = two_a1 - d[:, 0]
    q = two_a2 + u
    good = q > 0.0
    safe_q = np.where(good, q, 1.0)
    logsum = np.where(good, np.log1p(np.where(good, u, 0.0) / two_a2), 0.0)
    for i in range(1, m):
        u = (two_a1 - d[:, i]) - e[:, i - 1] ** 2 / safe_q
        q = two_a2 + u
        good &= q > 0.0
        safe_q = np.where(good, q, 1.0)
        logsum += np.where(good, np.log1p(np.where(good, u, 0.0) / two_a2), 0.0)
    out = 0.5 * d.sum(axis=1) + (params.a2 - params.r) * logsum
    return np.where(good, out, -np.inf), good


def log_lm_prime_batch_jacobi(
    params: EnsembleParams, diag: np.ndarray, offdiag: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Primed sample factor at ``v = 2a*lambda`` for unit-interval tridiagonals.

    Pivots ``p_i = (1 - d_i) - e_{i-1}^2 / p_{i-1}`` of ``I - T`` give
    ``prod p_i = prod (1 - lambda_i)``, and
    ``sum log1p((2a1 - 2a*lambda_i)/(2a2)) = m*log1p(a1/a2) + sum log p_i``.

    Returns ``(log_lm_prime, in_support)``; rows with ``lambda_max >= 1``
    (nonpositive pivot) get ``-inf`` and should be handled by the caller's
    clamping policy.
    """
    params.require_a2()
    d = np.asarray(diag, dtype=float)
    e = np.asarray(offdiag, dtype=float)
    n, m = d.shape
    p = 1.0 - d[:, 0]
    good = p > 0.0
    safe_p = np.where(good, p, 1.0)
    logsum = np.log(safe_p)
    for i in range(1, m):
        p = (1.0 - d[:, i]) - e[:, i - 1] ** 2 / safe_p
        good &= p > 0.0
        safe_p = np.where(good, p, 1.0)
        logsum += np.log(safe_p)
    trace = d.sum(axis=1)
    out = params.a * trace + (params.a2 - params.r) * (
        params.m * np.log1p(params.a1 / params.a2) + logsum
    )
    return np.where(good, out, -np.inf), good
