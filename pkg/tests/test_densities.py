"""Tests for log-densities, normalizing constants, and ratio factors."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from betaens.densities import (
    log_cj,
    log_cl,
    log_density_jacobi,
    log_density_laguerre,
    log_km_asymptotic,
    log_km_exact,
    log_km_prime,
    log_lm,
    log_lm_prime_batch_jacobi,
    log_lm_prime_batch_laguerre,
    log_ratio_terms,
    ratio_transfer,
)
from betaens.ensembles import (
    EnsembleParams,
    SpectrumKind,
    sample_jacobi_tridiagonal_batch,
    sample_laguerre_tridiagonal_batch,
    sample_spectrum,
)
from betaens.numerics import ParameterError, RngStream


class TestNormalizingConstants:
    def test_log_cj_m1_is_log_beta_reciprocal(self):
        p = EnsembleParams(beta=2.0, m=1, a1=3.0, a2=5.0)
        assert log_cj(p) == pytest.approx(math.log(105.0), rel=1e-12)

    def test_log_cj_m2_normalizes_density(self):
        p = EnsembleParams(beta=1.0, m=2, a1=2.0, a2=2.0)

        def integrand(v2, v1):
            return math.exp(log_density_jacobi(p, [v1, v2]))

        # Integrate the ordered region (smooth: the |v1-v2| kink sits on its
        # boundary) and double, since the density is symmetric.
        half, err = integrate.dblquad(integrand, 0.0, 1.0, 0.0, lambda v1: v1, epsabs=1e-9)
        assert 2.0 * half == pytest.approx(1.0, abs=max(1e-6, 20.0 * err))

    def test_log_cl_m1_closed_form(self):
        a1 = 3.7
        p = EnsembleParams(beta=1.0, m=1, a1=a1)
        expected = -a1 * math.log(2.0) - math.lgamma(a1)
        assert log_cl(p) == pytest.approx(expected, rel=1e-12)

    def test_log_cl_m2_normalizes_density(self):
        p = EnsembleParams(beta=2.0, m=2, a1=2.0)

        def integrand(v2, v1):
            return math.exp(log_density_laguerre(p, [v1, v2]))

        half, err = integrate.dblquad(integrand, 0.0, 60.0, 0.0, lambda v1: v1, epsabs=1e-9)
        assert 2.0 * half == pytest.approx(1.0, abs=max(1e-6, 20.0 * err))

    def test_missing_a2(self):
        p = EnsembleParams(beta=2.0, m=2, a1=4.0)
        with pytest.raises(ParameterError, match="a2 is required"):
            log_cj(p)


class TestJointDensities:
    def test_laguerre_m1_reduces_to_chi_square(self):
        p = EnsembleParams(beta=1.0, m=1, a1=5.0)
        for v in (0.5, 3.0, 12.0, 40.0):
            assert log_density_laguerre(p, [v]) == pytest.approx(
                stats.chi2(10.0).logpdf(v), rel=1e-12
            )

    def test_jacobi_m1_reduces_to_beta(self):
        p = EnsembleParams(beta=2.0, m=1, a1=3.0, a2=5.0)
        for v in (0.05, 0.3, 0.9):
            assert log_density_jacobi(p, [v]) == pytest.approx(
                stats.beta(3.0, 5.0).logpdf(v), rel=1e-12
            )

    def test_off_support_and_ties(self):
        pl = EnsembleParams(beta=1.0, m=2, a1=3.0)
        pj = EnsembleParams(beta=1.0, m=2, a1=3.0, a2=3.0)
        assert log_density_laguerre(pl, [2.0, 2.0]) == -math.inf
        assert log_density_laguerre(pl, [-0.1, 2.0]) == -math.inf
        assert log_density_jacobi(pj, [0.5, 1.0]) == -math.inf
        assert log_density_jacobi(pj, [0.3, 0.3]) == -math.inf

    def test_wrong_length_vector(self):
        p = EnsembleParams(beta=1.0, m=3, a1=4.0)
        with pytest.raises(ParameterError, match="length-3"):
            log_density_laguerre(p, [1.0, 2.0])

    def test_density_mean_matches_sampler(self):
        # E[v1 + v2] under the unit-interval density via quadrature equals the
        # closed-form first moment a1*m/a and the sampler's empirical mean.
        p = EnsembleParams(beta=2.0, m=2, a1=3.0, a2=6.0)

        def integrand(v2, v1):
            return (v1 + v2) * math.exp(log_density_jacobi(p, [v1, v2]))

        total, _ = integrate.dblquad(integrand, 0.0, 1.0, 0.0, 1.0, epsabs=1e-9)
        assert total == pytest.approx(p.a1 * p.m / p.a, abs=1e-6)
        diag, _ = sample_jacobi_tridiagonal_batch(p, 40_000, RngStream(600))
        sums = diag.sum(axis=1)
        se = sums.std(ddof=1) / math.sqrt(sums.size)
        assert abs(sums.mean() - total) < 4.0 * se


class TestConstantRatioFactor:
    def test_small_closed_form(self):
        p = EnsembleParams(beta=2.0, m=1, a1=1.0, a2=9.0)
        assert log_km_exact(p) == pytest.approx(math.log(0.9), rel=1e-12)

    def test_high_precision_oracle(self):
        # Frozen 60-digit evaluations of the Gamma-sum form.  The
        # cancellation-free summation keeps absolute error near 1e-13 even
        # where the naive Gamma-difference sum would lose ~1e-4 to rounding.
        p = EnsembleParams(beta=2.0, m=3, a1=10.0, a2=1e5)
        assert log_km_exact(p) == pytest.approx(-0.001949881758634322, abs=1e-12)
        q = EnsembleParams(beta=1.0, m=50, a1=1000.0, a2=1e8)
        assert log_km_exact(q) == pytest.approx(-0.2563733020073946, abs=1e-9)

    def test_consistent_with_normalizing_constants(self):
        p = EnsembleParams(beta=1.0, m=5, a1=10.0, a2=100.0)
        via_constants = log_cj(p) - p.a1 * p.m * math.log(2.0 * p.a) - log_cl(p)
        assert log_km_exact(p) == pytest.approx(via_constants, rel=1e-10, abs=1e-8)

    def test_asymptotic_agrees_at_large_a2(self):
        p = EnsembleParams(beta=1.0, m=50, a1=1000.0, a2=1e8)
        assert abs(log_km_exact(p) - log_km_asymptotic(p)) <= 0.01

    def test_primed_constant_transfer(self):
        p = EnsembleParams(beta=2.0, m=4, a1=6.0, a2=500.0)
        assert log_km_prime(p) == pytest.approx(log_km_exact(p) - ratio_transfer(p), rel=1e-14)
        expected = p.m * (p.a2 - p.r) * math.log1p(p.a1 / p.a2)
        assert ratio_transfer(p) == pytest.approx(expected, rel=1e-14)


class TestSampleRatioFactor:
    def test_zero_vector(self):
        p = EnsembleParams(beta=1.0, m=3, a1=4.0, a2=20.0)
        assert log_lm(p, np.zeros(3)) == 0.0

    def test_off_support(self):
        p = EnsembleParams(beta=1.0, m=2, a1=3.0, a2=10.0)
        assert log_lm(p, [1.0, 2.0 * p.a]) == -math.inf
        assert log_lm(p, [1.0, 50.0]) == -math.inf

    def test_m1_high_precision_oracle(self):
        # Frozen mpmath value of v/2 + (a2-r)*log(1 - v/(2a)).
        p = EnsembleParams(beta=1.0, m=1, a1=100.0, a2=1e7)
        assert log_lm(p, [250.0]) == pytest.approx(4.812465677335740e-4, abs=1e-9)

    def test_primed_at_centering_point(self):
        p = EnsembleParams(beta=2.0, m=5, a1=30.0, a2=4000.0)
        terms = log_ratio_terms(p, np.full(5, 2.0 * p.a1))
        assert terms.in_support
        assert terms.log_lm_prime == pytest.approx(p.a1 * p.m, rel=1e-12)

    def test_plain_and_primed_routes_agree(self):
        p = EnsembleParams(beta=1.0, m=20, a1=200.0, a2=1e6)
        gen = RngStream(601).generator()
        for _ in range(100):
            spec = sample_spectrum(SpectrumKind.JACOBI_SCALED, p, gen)
            t = log_ratio_terms(p, spec.values)
            assert t.in_support
            lhs = t.log_km + t.log_lm
            rhs = t.log_km_prime + t.log_lm_prime
            assert abs(lhs - rhs) <= 1e-8

    def test_off_support_terms(self):
        p = EnsembleParams(beta=1.0, m=2, a1=3.0, a2=10.0)
        t = log_ratio_terms(p, [30.0, 1.0])
        assert not t.in_support
        assert t.log_lm == -math.inf and t.log_lm_prime == -math.inf
        assert math.isfinite(t.log_km) and math.isfinite(t.log_km_prime)


class TestChangeOfVariablesIdentity:
    def test_density_ratio_equals_factorization(self):
        # jacobi log-density at v/(2a), Jacobian included, minus the Laguerre
        # log-density must equal the constant factor plus the sample factor.
        p = EnsembleParams(beta=1.0, m=3, a1=5.0, a2=50.0)
        gen = RngStream(602).generator()
        for _ in range(25):
            v = sample_spectrum(SpectrumKind.JACOBI_SCALED, p, gen).values
            lhs = (
                log_density_jacobi(p, v / (2.0 * p.a))
                - p.m * math.log(2.0 * p.a)
                - log_density_laguerre(p, v)
            )
            t = log_ratio_terms(p, v)
            assert lhs == pytest.approx(t.log_km + t.log_lm, abs=1e-6)
            assert lhs == pytest.approx(t.log_km_prime + t.log_lm_prime, abs=1e-6)


class TestBatchedSampleFactor:
    def test_laguerre_batch_matches_eigen_route(self):
        p = EnsembleParams(beta=1.0, m=10, a1=50.0, a2=5000.0)
        diag, off = sample_laguerre_tridiagonal_batch(p, 200, RngStream(603))
        vals, good = log_lm_prime_batch_laguerre(p, diag, off)
        assert good.all()
        from betaens.ensembles import SymmetricTridiagonal, eigenvalues

        for row in range(0, 200, 37):
            w = eigenvalues(SymmetricTridiagonal(diag=diag[row], offdiag=off[row]))
            expected = log_ratio_terms(p, w).log_lm_prime
            assert vals[row] == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_jacobi_batch_matches_eigen_route(self):
        p = EnsembleParams(beta=2.0, m=8, a1=40.0, a2=3000.0)
        diag, off = sample_jacobi_tridiagonal_batch(p, 200, RngStream(604))
        vals, good = log_lm_prime_batch_jacobi(p, diag, off)
        assert good.all()
        from betaens.ensembles import SymmetricTridiagonal, eigenvalues

        for row in range(0, 200, 41):
            lam = eigenvalues(SymmetricTridiagonal(diag=diag[row], offdiag=off[row]))
            expected = log_ratio_terms(p, 2.0 * p.a * lam).log_lm_prime
            assert vals[row] == pytest.approx(expected, rel=1e-9, abs=1e-9)

    def test_laguerre_batch_flags_off_support(self):
        p = EnsembleParams(beta=1.0, m=1, a1=3.0, a2=10.0)
        diag = np.array([[5.0], [2.0 * p.a + 1.0]])
        off = np.zeros((2, 0))
        vals, good = log_lm_prime_batch_laguerre(p, diag, off)
        assert good[0] and not good[1]
        assert vals[1] == -math.inf
        assert vals[0] == pytest.approx(log_ratio_terms(p, [5.0]).log_lm_prime, rel=1e-12)

    def test_jacobi_batch_flags_off_support(self):
        p = EnsembleParams(beta=1.0, m=1, a1=3.0, a2=10.0)
        vals, good = log_lm_prime_batch_jacobi(p, np.array([[0.4], [1.2]]), np.zeros((2, 0)))
        assert good[0] and not good[1]
        assert vals[1] == -math.inf
        assert vals[0] == pytest.approx(
            log_ratio_terms(p, [2.0 * p.a * 0.4]).log_lm_prime, rel=1e-10
        )
