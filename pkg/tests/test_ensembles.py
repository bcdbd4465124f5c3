"""Tests for the bidiagonal matrix models and spectrum extraction."""

import math

import numpy as np
import pytest
from scipy import stats

from betaens.ensembles import (
    EnsembleParams,
    JacobiBidiagonal,
    LaguerreBidiagonal,
    Spectrum,
    SpectrumKind,
    SymmetricTridiagonal,
    batch_chunk_sizes,
    clamp_unit_eigenvalues,
    eigenvalues,
    gram_tridiagonal,
    jacobi_beta_parameters,
    laguerre_dofs,
    sample_jacobi_bidiagonal,
    sample_jacobi_tridiagonal_batch,
    sample_laguerre_bidiagonal,
    sample_laguerre_tridiagonal_batch,
    sample_spectrum,
    tridiagonal_power_traces,
)
from betaens.numerics import ConsistencyError, ParameterError, RngStream, ks_test


class TestEnsembleParams:
    def test_derived_quantities(self):
        p = EnsembleParams(beta=2.0, m=4, a1=10.0, a2=20.0)
        assert p.eta == 1.0
        assert p.r == 4.0
        assert p.a == 30.0
        assert p.has_a2

    def test_a1_bound_message_names_constraint(self):
        with pytest.raises(ParameterError, match=r"a1 must exceed beta\*\(m-1\)/2"):
            EnsembleParams(beta=2.0, m=5, a1=4.0)

    def test_a2_bound(self):
        with pytest.raises(ParameterError, match="a2 must exceed"):
            EnsembleParams(beta=2.0, m=5, a1=10.0, a2=4.0)

    def test_boundary_value_rejected(self):
        with pytest.raises(ParameterError):
            EnsembleParams(beta=2.0, m=3, a1=2.0)

    @pytest.mark.parametrize("kwargs", [
        {"beta": 0.0, "m": 1, "a1": 1.0},
        {"beta": -1.0, "m": 1, "a1": 1.0},
        {"beta": 1.0, "m": 0, "a1": 1.0},
        {"beta": 1.0, "m": 2.5, "a1": 9.0},
    ])
    def test_invalid_basic_fields(self, kwargs):
        with pytest.raises(ParameterError):
            EnsembleParams(**kwargs)

    def test_missing_a2_guard(self):
        p = EnsembleParams(beta=1.0, m=2, a1=3.0)
        assert not p.has_a2
        with pytest.raises(ParameterError, match="a2 is required"):
            _ = p.a
        with pytest.raises(ParameterError, match="a2 is required"):
            p.require_a2()


class TestFactorLaws:
    def test_laguerre_dofs_m3(self):
        p = EnsembleParams(beta=2.0, m=3, a1=4.0)
        x_dof, y_dof = laguerre_dofs(p)
        np.testing.assert_allclose(x_dof, [8.0, 6.0, 4.0])
        np.testing.assert_allclose(y_dof, [4.0, 2.0])

    def test_laguerre_dofs_m1(self):
        x_dof, y_dof = laguerre_dofs(EnsembleParams(beta=1.0, m=1, a1=5.0))
        np.testing.assert_allclose(x_dof, [10.0])
        assert y_dof.size == 0

    def test_jacobi_beta_parameters_m1(self):
        c_a, c_b, cp_a, cp_b = jacobi_beta_parameters(EnsembleParams(beta=3.0, m=1, a1=2.0, a2=7.0))
        np.testing.assert_allclose(c_a, [2.0])
        np.testing.assert_allclose(c_b, [7.0])
        assert cp_a.size == 0 and cp_b.size == 0

    def test_jacobi_beta_parameters_m2(self):
        p = EnsembleParams(beta=2.0, m=2, a1=3.0, a2=5.0)
        c_a, c_b, cp_a, cp_b = jacobi_beta_parameters(p)
        np.testing.assert_allclose(c_a, [2.0, 3.0])
        np.testing.assert_allclose(c_b, [4.0, 5.0])
        np.testing.assert_allclose(cp_a, [1.0])
        np.testing.assert_allclose(cp_b, [6.0])


class TestLaguerreSampler:
    def test_m1_square_is_chi_square(self):
        p = EnsembleParams(beta=1.0, m=1, a1=5.0)
        gen = RngStream(500).generator()
        vals = np.array([sample_laguerre_bidiagonal(p, gen).x[0] ** 2 for _ in range(10_000)])
        assert ks_test(vals, stats.chi2(10.0).cdf).p_value > 0.01

    def test_entry_sum_mean(self):
        p = EnsembleParams(beta=1.0, m=5, a1=10.0)
        gen = RngStream(501).generator()
        sums = np.empty(100_000)
        for k in range(sums.size):
            bid = sample_laguerre_bidiagonal(p, gen)
            sums[k] = float(np.sum(bid.x**2) + np.sum(bid.y**2))
        se = sums.std(ddof=1) / math.sqrt(sums.size)
        assert abs(sums.mean() - 100.0) < 4.0 * se

    def test_rngstream_repeatable(self):
        p = EnsembleParams(beta=2.0, m=4, a1=6.0)
        a = sample_laguerre_bidiagonal(p, RngStream(7))
        b = sample_laguerre_bidiagonal(p, RngStream(7))
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.y, b.y)


class TestJacobiSampler:
    def test_entries_in_open_interval(self):
        p = EnsembleParams(beta=1.0, m=6, a1=4.0, a2=8.0)
        bid = sample_jacobi_bidiagonal(p, RngStream(502))
        assert np.all(bid.c > 0) and np.all(bid.c < 1)
        assert np.all(bid.cp > 0) and np.all(bid.cp < 1)
        np.testing.assert_allclose(bid.c + bid.s, 1.0)
        np.testing.assert_allclose(bid.cp + bid.sp, 1.0)

    def test_trace_mean_matches_leading_moment(self):
        p = EnsembleParams(beta=2.0, m=2, a1=3.0, a2=300.0)
        diag, _ = sample_jacobi_tridiagonal_batch(p, 100_000, RngStream(503))
        traces = diag.sum(axis=1)
        se = traces.std(ddof=1) / math.sqrt(traces.size)
        assert abs(traces.mean() - 6.0 / 303.0) < 4.0 * se


class TestGramTridiagonal:
    def test_diagonal_factor(self):
        t = gram_tridiagonal(LaguerreBidiagonal(x=np.array([2.0, 3.0]), y=np.array([0.0])))
        np.testing.assert_allclose(t.diag, [4.0, 9.0])
        np.testing.assert_allclose(t.offdiag, [0.0])

    def test_hand_computed_two_by_two(self):
        t = gram_tridiagonal(LaguerreBidiagonal(x=np.array([1.0, 1.0]), y=np.array([1.0])))
        np.testing.assert_allclose(t.diag, [1.0, 2.0])
        np.testing.assert_allclose(t.offdiag, [1.0])

    def test_trace_equals_entry_sum(self):
        p = EnsembleParams(beta=1.5, m=6, a1=9.0)
        bid = sample_laguerre_bidiagonal(p, RngStream(504))
        t = gram_tridiagonal(bid)
        target = float(np.sum(bid.x**2) + np.sum(bid.y**2))
        assert float(t.diag.sum()) == pytest.approx(target, rel=1e-12)

    def test_jacobi_gram_matches_dense_factor(self):
        p = EnsembleParams(beta=2.0, m=4, a1=5.0, a2=7.0)
        bid = sample_jacobi_bidiagonal(p, RngStream(505))
        t = gram_tridiagonal(bid)
        m = p.m
        c, s, cp, sp = bid.c, bid.s, bid.cp, bid.sp
        b_dense = np.zeros((m, m))
        for i in range(1, m + 1):
            sp_prev = sp[m - i - 1] if m - i - 1 >= 0 else 1.0
            b_dense[i - 1, i - 1] = math.sqrt(c[m - i] * sp_prev)
            if i > 1:
                b_dense[i - 1, i - 2] = -math.sqrt(s[m - i] * cp[m - i])
        dense = b_dense @ b_dense.T
        np.testing.assert_allclose(t.diag, np.diag(dense), rtol=1e-12)
        # Off-diagonal signs are a similarity gauge; magnitudes and spectra must agree.
        np.testing.assert_allclose(t.offdiag, np.abs(np.diag(dense, -1)), rtol=1e-12)
        np.testing.assert_allclose(eigenvalues(t), np.sort(np.linalg.eigvalsh(dense))[::-1], rtol=1e-10)


class TestEigenvalues:
    def test_diagonal_matrix(self):
        w = eigenvalues(SymmetricTridiagonal(diag=np.array([4.0, 9.0]), offdiag=np.array([0.0])))
        np.testing.assert_allclose(w, [9.0, 4.0])

    def test_two_by_two_closed_form(self):
        w = eigenvalues(SymmetricTridiagonal(diag=np.array([2.0, 2.0]), offdiag=np.array([1.0])))
        np.testing.assert_allclose(w, [3.0, 1.0], rtol=1e-14)

    def test_power_traces_against_dense_oracle(self):
        p = EnsembleParams(beta=2.0, m=8, a1=12.0)
        t = gram_tridiagonal(sample_laguerre_bidiagonal(p, RngStream(506)))
        w = eigenvalues(t)
        dense = np.diag(t.diag) + np.diag(t.offdiag, 1) + np.diag(t.offdiag, -1)
        power = np.eye(t.m)
        for k in (1, 2, 3):
            power = power @ dense
            assert float(np.sum(w**k)) == pytest.approx(float(np.trace(power)), rel=1e-10)

    def test_sorted_nonincreasing(self):
        p = EnsembleParams(beta=1.0, m=20, a1=15.0)
        w = eigenvalues(gram_tridiagonal(sample_laguerre_bidiagonal(p, RngStream(507))))
        assert np.all(np.diff(w) <= 0.0)


class TestSampleSpectrum:
    def test_jacobi_unit_support(self):
        p = EnsembleParams(beta=1.0, m=8, a1=6.0, a2=9.0)
        for k in range(20):
            spec = sample_spectrum(SpectrumKind.JACOBI_UNIT, p, RngStream(508, k))
            assert np.all(spec.values > 0.0) and np.all(spec.values < 1.0)

    def test_jacobi_scaled_is_2a_times_unit(self):
        p = EnsembleParams(beta=2.0, m=3, a1=4.0, a2=50.0)
        unit = sample_spectrum(SpectrumKind.JACOBI_UNIT, p, RngStream(509))
        scaled = sample_spectrum(SpectrumKind.JACOBI_SCALED, p, RngStream(509))
        np.testing.assert_allclose(scaled.values, 2.0 * p.a * unit.values, rtol=1e-12)

    def test_laguerre_m1_chi_square(self):
        p = EnsembleParams(beta=1.0, m=1, a1=5.0)
        gen = RngStream(510).generator()
        vals = np.array([sample_spectrum(SpectrumKind.LAGUERRE, p, gen).values[0] for _ in range(10_000)])
        assert ks_test(vals, stats.chi2(10.0).cdf).p_value > 0.01

    def test_largest_eigenvalue_near_predicted_edge(self):
        p = EnsembleParams(beta=1.0, m=2000, a1=2000.0, a2=4e6)
        edge = p.beta * (1.0 + math.sqrt(2.0)) ** 2
        ratios = [
            sample_spectrum(SpectrumKind.LAGUERRE, p, RngStream(511, k)).values[0] / p.m
            for k in range(3)
        ]
        assert abs(float(np.mean(ratios)) - edge) < 0.05 * edge

    def test_string_kind_accepted(self):
        p = EnsembleParams(beta=1.0, m=2, a1=3.0, a2=40.0)
        spec = sample_spectrum("jacobi", p, RngStream(512))
        assert spec.kind is SpectrumKind.JACOBI_UNIT


class TestTraceIdentities:
    @pytest.mark.parametrize("m", [1, 2, 5, 50])
    def test_three_identities_per_draw(self, m):
        beta = 1.5
        a1 = max(4.0, beta * (m - 1) / 2.0 + 2.0)
        p = EnsembleParams(beta=beta, m=m, a1=a1)
        gen = RngStream(513, m).generator()
        for _ in range(100):
            bid = sample_laguerre_bidiagonal(p, gen)
            x2 = bid.x**2
            y2 = bid.y**2
            z = x2.copy()
            if m > 1:
                z[1:] += y2
            mu = eigenvalues(gram_tridiagonal(bid))
            shift = 2.0 * a1
            dev = mu - shift
            zdev = z - shift
            lin_lhs, lin_rhs = float(mu.sum()), float(x2.sum() + y2.sum())
            assert abs(lin_lhs - lin_rhs) <= 1e-10 * max(1.0, abs(lin_lhs))
            quad_lhs = float(np.sum(dev**2))
            quad_rhs = float(np.sum(zdev**2) + (2.0 * np.sum(x2[:-1] * y2) if m > 1 else 0.0))
            assert abs(quad_lhs - quad_rhs) <= 1e-9 * max(1.0, quad_lhs)
            cube_lhs = float(np.sum(dev**3))
            cube_rhs = float(np.sum(zdev**3))
            if m > 1:
                cube_rhs += float(3.0 * np.sum(x2[:-1] * y2 * (zdev[:-1] + zdev[1:])))
            assert abs(cube_lhs - cube_rhs) <= 1e-9 * max(1.0, abs(cube_lhs), float(np.sum(np.abs(dev) ** 3)))

    def test_batched_traces_match_direct(self):
        p = EnsembleParams(beta=2.0, m=5, a1=8.0)
        diag, off = sample_laguerre_tridiagonal_batch(p, 64, RngStream(514))
        t1, t2, t3 = tridiagonal_power_traces(diag, off, shift=2.0 * p.a1)
        for row in range(0, 64, 17):
            w = eigenvalues(SymmetricTridiagonal(diag=diag[row], offdiag=off[row]))
            dev = w - 2.0 * p.a1
            assert t1[row] == pytest.approx(float(dev.sum()), rel=1e-10, abs=1e-8)
            assert t2[row] == pytest.approx(float(np.sum(dev**2)), rel=1e-9)
            assert t3[row] == pytest.approx(float(np.sum(dev**3)), rel=1e-8, abs=1e-6)

    def test_vector_input_traces(self):
        t1, t2, t3 = tridiagonal_power_traces(np.array([2.0, 2.0]), np.array([1.0]), shift=0.0)
        assert t1[0] == pytest.approx(4.0)
        assert t2[0] == pytest.approx(10.0)  # 3^2 + 1^2
        assert t3[0] == pytest.approx(28.0)  # 3^3 + 1^3


class TestBatchSamplers:
    def test_laguerre_batch_shapes_and_mean(self):
        p = EnsembleParams(beta=1.0, m=3, a1=5.0)
        diag, off = sample_laguerre_tridiagonal_batch(p, 20_000, RngStream(515))
        assert diag.shape == (20_000, 3) and off.shape == (20_000, 2)
        sums = diag.sum(axis=1)
        se = sums.std(ddof=1) / math.sqrt(sums.size)
        assert abs(sums.mean() - 2.0 * p.a1 * p.m) < 4.0 * se

    def test_laguerre_batch_m1(self):
        p = EnsembleParams(beta=1.0, m=1, a1=5.0)
        diag, off = sample_laguerre_tridiagonal_batch(p, 100, RngStream(516))
        assert diag.shape == (100, 1) and off.shape == (100, 0)

    def test_jacobi_batch_matches_single_draw_law(self):
        p = EnsembleParams(beta=1.0, m=4, a1=6.0, a2=12.0)
        diag, off = sample_jacobi_tridiagonal_batch(p, 4000, RngStream(517))
        assert diag.shape == (4000, 4) and off.shape == (4000, 3)
        singles = np.empty(4000)
        gen = RngStream(518).generator()
        for k in range(4000):
            t = gram_tridiagonal(sample_jacobi_bidiagonal(p, gen))
            singles[k] = float(t.diag.sum())
        assert stats.ks_2samp(diag.sum(axis=1), singles).pvalue > 0.01

    def test_chunk_sizes_partition(self):
        for n, m in ((10, 3), (5000, 200), (123457, 1000)):
            sizes = batch_chunk_sizes(n, m)
            assert sum(sizes) == n
            assert all(s > 0 for s in sizes)


class TestClampAndValidation:
    def test_clamp_within_tolerance(self):
        v = np.array([1.0 + 5e-13, 0.5, -5e-13])
        out = clamp_unit_eigenvalues(v)
        assert out[0] == 1.0 and out[2] == 0.0

    def test_clamp_beyond_tolerance_raises(self):
        with pytest.raises(ConsistencyError):
            clamp_unit_eigenvalues(np.array([1.0 + 1e-9]))

    def test_spectrum_sorting_enforced(self):
        with pytest.raises(ParameterError):
            Spectrum(values=np.array([1.0, 2.0]), kind=SpectrumKind.LAGUERRE)

    def test_spectrum_unit_range_enforced(self):
        with pytest.raises(ParameterError):
            Spectrum(values=np.array([1.5, 0.5]), kind=SpectrumKind.JACOBI_UNIT)

    def test_bidiagonal_shape_validation(self):
        with pytest.raises(ParameterError):
            LaguerreBidiagonal(x=np.array([1.0, 2.0]), y=np.array([1.0, 2.0]))
        with pytest.raises(ParameterError):
            JacobiBidiagonal(c=np.array([0.5, 1.5]), cp=np.array([0.5]))
