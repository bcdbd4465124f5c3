"""Bidiagonal matrix models for half-line and unit-interval beta ensembles,
with Monte Carlo total-variation and Kullback-Leibler estimates between the
scaled unit-interval law and its half-line limit, normal-limit verification
harnesses, and parameter-regime scans.
"""

from .densities import (
    LogRatioTerms,
    log_cj,
    log_cl,
    log_density_jacobi,
    log_density_laguerre,
    log_km_asymptotic,
    log_km_exact,
    log_km_prime,
    log_lm,
    log_ratio_terms,
    ratio_transfer,
)
from .distances import (
    CltReport,
    Estimate,
    clt_harness,
    kl_estimate,
    limit_tv_reference,
    pinsker_gap,
    quadratic_clt_check,
    tv_estimate,
    u_shift,
    u_statistic,
)
from .ensembles import (
    EnsembleParams,
    JacobiBidiagonal,
    LaguerreBidiagonal,
    Spectrum,
    SpectrumKind,
    SymmetricTridiagonal,
    gram_tridiagonal,
    eigenvalues,
    sample_jacobi_bidiagonal,
    sample_laguerre_bidiagonal,
    sample_spectrum,
)
from .moments import (
    AuxSequences,
    JacobiMomentEstimates,
    LaguerreStats,
    aux_sequences,
    chi_moment,
    cubic_variance_probe,
    jacobi_moment_estimates,
    laguerre_exact_stats,
    spectral_edge_prediction,
    trace_power_oracle,
)
from .numerics import (
    ConsistencyError,
    EstimatorError,
    KsReport,
    ParameterError,
    RngStream,
    SummaryStats,
    accumulate,
    ks_test,
    log_gamma,
    normal_cdf,
    sample_beta,
    sample_chi_square,
)
from .regimes import (
    RegimePoint,
    RegimeSchedule,
    ScanResult,
    a1_limit_tv_reference,
    make_schedule,
    scan,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # numerics
    "ParameterError",
    "ConsistencyError",
    "EstimatorError",
    "RngStream",
    "SummaryStats",
    "KsReport",
    "accumulate",
    "ks_test",
    "log_gamma",
    "normal_cdf",
    "sample_beta",
    "sample_chi_square",
    # ensembles
    "EnsembleParams",
    "LaguerreBidiagonal",
    "JacobiBidiagonal",
    "SymmetricTridiagonal",
    "Spectrum",
    "SpectrumKind",
    "sample_laguerre_bidiagonal",
    "sample_jacobi_bidiagonal",
    "gram_tridiagonal",
    "eigenvalues",
    "sample_spectrum",
    # densities
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
    # moments
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
    # distances
    "Estimate",
    "CltReport",
    "u_statistic",
    "u_shift",
    "tv_estimate",
    "kl_estimate",
    "limit_tv_reference",
    "pinsker_gap",
    "clt_harness",
    "quadratic_clt_check",
    # regimes
    "RegimePoint",
    "RegimeSchedule",
    "ScanResult",
    "make_schedule",
    "scan",
    "a1_limit_tv_reference",
]
