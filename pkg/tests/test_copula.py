"""Tests for rank transforms, Gaussian copula fits, sampling, histograms."""

import math

import numpy as np
import pytest
from scipy.stats import multivariate_normal, norm

from copulametrics import copula
from copulametrics.distances import cramer_rao_bound
from copulametrics.errors import (
    BoundaryPoint,
    DegenerateInput,
    DomainError,
    GridTooLarge,
    InvalidInput,
    InvalidMatrix,
    NotPositiveDefinite,
    TooFewSamples,
)


class TestCorrelationMatrix:
    def test_accepts_valid_matrix(self):
        cm = copula.CorrelationMatrix(np.array([[1.0, 0.3], [0.3, 1.0]]))
        assert cm.dim == 2
        np.testing.assert_array_equal(np.diag(cm.values), 1.0)

    def test_accepts_comonotone_boundary(self):
        # rho = 1 is singular but still a correlation matrix
        cm = copula.CorrelationMatrix(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert cm.dim == 2

    def test_rejects_non_unit_diagonal(self):
        with pytest.raises(InvalidMatrix, match="unit diagonal"):
            copula.CorrelationMatrix(np.array([[2.0, 0.0], [0.0, 1.0]]))

    def test_rejects_entries_outside_range(self):
        with pytest.raises(InvalidMatrix, match=r"\[-1, 1\]"):
            copula.CorrelationMatrix(np.array([[1.0, 1.5], [1.5, 1.0]]))

    def test_rejects_indefinite_matrix(self):
        arr = np.full((3, 3), -0.9)
        np.fill_diagonal(arr, 1.0)
        with pytest.raises(InvalidMatrix, match="not PSD"):
            copula.CorrelationMatrix(arr)

    def test_rejects_too_small(self):
        with pytest.raises(InvalidMatrix, match="at least 2x2"):
            copula.CorrelationMatrix(np.array([[1.0]]))

    def test_values_are_read_only(self):
        cm = copula.CorrelationMatrix(np.eye(2))
        with pytest.raises(ValueError):
            cm.values[0, 1] = 0.5

    def test_bivariate_helper(self):
        cm = copula.bivariate_correlation(-0.25)
        np.testing.assert_array_equal(
            cm.values, np.array([[1.0, -0.25], [-0.25, 1.0]])
        )

    def test_bivariate_helper_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            copula.bivariate_correlation(1.01)


class TestGaussianCopulaModel:
    def test_carries_provenance(self):
        model = copula.GaussianCopulaModel(
            copula.bivariate_correlation(0.5),
            fit_method="normal-scores",
            sample_size=100,
        )
        assert model.dim == 2
        assert model.sample_size == 100

    def test_rejects_unknown_fit_method(self):
        with pytest.raises(InvalidInput, match="fit method"):
            copula.GaussianCopulaModel(
                copula.bivariate_correlation(0.5), fit_method="mystery"
            )


class TestNormalCdfQuantile:
    def test_cdf_at_zero(self):
        assert copula.std_normal_cdf(0.0) == 0.5

    def test_quantile_frozen_value(self):
        # high-precision reference: 1.9599639845400545...
        assert copula.std_normal_quantile(0.975) == pytest.approx(
            1.959963984540054, abs=1e-12
        )

    def test_cdf_symmetry(self):
        x = np.linspace(-8.0, 8.0, 321)
        np.testing.assert_allclose(
            copula.std_normal_cdf(-x), 1.0 - copula.std_normal_cdf(x), atol=1e-12
        )

    def test_roundtrip(self):
        x = np.linspace(-5.0, 5.0, 101)
        back = copula.std_normal_quantile(copula.std_normal_cdf(x))
        np.testing.assert_allclose(back, x, atol=1e-9)

    def test_quantile_scalar_type(self):
        assert isinstance(copula.std_normal_quantile(0.25), float)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.1, float("nan")])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            copula.std_normal_quantile(p)


class TestPseudoObservations:
    def test_small_example(self):
        u = copula.pseudo_observations([3.1, -0.2, 7.5])
        np.testing.assert_allclose(u, [0.5, 0.25, 0.75])

    def test_ties_get_average_rank(self):
        u = copula.pseudo_observations([1.0, 1.0])
        np.testing.assert_allclose(u, [0.5, 0.5])

    def test_columns_ranked_independently(self):
        series = np.array([[1.0, 30.0], [2.0, 10.0], [3.0, 20.0]])
        u = copula.pseudo_observations(series)
        np.testing.assert_allclose(u[:, 0], [0.25, 0.5, 0.75])
        np.testing.assert_allclose(u[:, 1], [0.75, 0.25, 0.5])

    def test_output_strictly_interior(self):
        rng = np.random.default_rng(11)
        u = copula.pseudo_observations(rng.standard_normal((500, 3)))
        assert u.min() > 0.0 and u.max() < 1.0

    def test_monotone_invariance(self):
        rng = np.random.default_rng(23)
        transforms = [np.exp, lambda x: x**3, lambda x: 2.5 * x + 7.0]
        for case in range(120):
            x = rng.standard_normal(40)
            f = transforms[case % len(transforms)]
            np.testing.assert_array_equal(
                copula.pseudo_observations(x), copula.pseudo_observations(f(x))
            )

    def test_rejects_too_few(self):
        with pytest.raises(TooFewSamples):
            copula.pseudo_observations([1.0])

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInput, match="non-finite"):
            copula.pseudo_observations([1.0, np.nan, 2.0])

    def test_rejects_wrong_ndim(self):
        with pytest.raises(InvalidInput):
            copula.pseudo_observations(np.zeros((2, 2, 2)))


class TestKendallToPearson:
    def test_fixed_points(self):
        assert copula.kendall_to_pearson(0.0) == 0.0
        assert copula.kendall_to_pearson(1.0) == pytest.approx(1.0, abs=1e-15)
        assert copula.kendall_to_pearson(-1.0) == pytest.approx(-1.0, abs=1e-15)

    def test_one_third(self):
        assert copula.kendall_to_pearson(1.0 / 3.0) == pytest.approx(0.5, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            copula.kendall_to_pearson(1.2)


class TestNearestCorrelation:
    def test_comonotone_becomes_positive_definite(self):
        cm = copula.nearest_correlation(np.array([[1.0, 1.0], [1.0, 1.0]]))
        eigs = np.linalg.eigvalsh(cm.values)
        assert eigs.min() > 0.0
        np.testing.assert_array_equal(np.diag(cm.values), 1.0)

    def test_valid_input_left_almost_unchanged(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            z = rng.standard_normal((200, 3))
            est = np.corrcoef(z, rowvar=False)
            cm = copula.nearest_correlation(est)
            np.testing.assert_allclose(cm.values, est, atol=1e-8)


class TestFit:
    def test_normal_scores_recovers_rho(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.5))
        u = copula.sample_gaussian_copula(model, 100_000, seed=42)
        fit = copula.fit_gaussian_copula(u, method="normal-scores")
        assert 0.49 <= fit.correlation.values[0, 1] <= 0.51
        assert fit.fit_method == "normal-scores"
        assert fit.sample_size == 100_000

    def test_independent_data_near_zero(self):
        rng = np.random.default_rng(7)
        u = copula.pseudo_observations(rng.standard_normal((50_000, 2)))
        fit = copula.fit_gaussian_copula(u)
        assert abs(fit.correlation.values[0, 1]) <= 0.02

    def test_kendall_inversion_exact_small_case(self):
        # tau = 1/3 on three points, so rho = sin(pi / 6) = 1/2
        u = copula.pseudo_observations(
            np.array([[1.0, 1.0], [2.0, 3.0], [3.0, 2.0]])
        )
        fit = copula.fit_gaussian_copula(u, method="kendall-inversion")
        assert fit.correlation.values[0, 1] == pytest.approx(0.5, abs=1e-12)

    def test_methods_agree_on_gaussian_data(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.7))
        u = copula.sample_gaussian_copula(model, 20_000, seed=9)
        a = copula.fit_gaussian_copula(u, method="normal-scores")
        b = copula.fit_gaussian_copula(u, method="kendall-inversion")
        assert a.correlation.values[0, 1] == pytest.approx(
            b.correlation.values[0, 1], abs=0.02
        )

    @pytest.mark.parametrize("rho", [0.1, 0.5, 0.9, 0.99])
    def test_sample_then_refit_within_tolerance(self, rho):
        t = 20_000
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(rho))
        u = copula.sample_gaussian_copula(model, t, seed=1234)
        fit = copula.fit_gaussian_copula(u, method="normal-scores")
        tol = 3.0 * math.sqrt(cramer_rao_bound(rho) / t) + 0.01
        assert abs(fit.correlation.values[0, 1] - rho) <= tol

    def test_trivariate_fit(self):
        corr = copula.CorrelationMatrix(
            np.array([[1.0, 0.6, 0.2], [0.6, 1.0, 0.4], [0.2, 0.4, 1.0]])
        )
        u = copula.sample_gaussian_copula(
            copula.GaussianCopulaModel(corr), 50_000, seed=77
        )
        fit = copula.fit_gaussian_copula(u)
        np.testing.assert_allclose(fit.correlation.values, corr.values, atol=0.02)

    def test_rejects_constant_column(self):
        u = np.column_stack([np.full(10, 0.5), np.linspace(0.1, 0.9, 10)])
        with pytest.raises(DegenerateInput, match="column 0"):
            copula.fit_gaussian_copula(u)

    def test_rejects_too_few_rows(self):
        with pytest.raises(TooFewSamples):
            copula.fit_gaussian_copula(np.array([[0.2, 0.3], [0.4, 0.5]]))

    def test_rejects_boundary_values(self):
        u = np.array([[0.0, 0.5], [0.5, 0.2], [0.7, 0.9]])
        with pytest.raises(InvalidInput, match="strictly inside"):
            copula.fit_gaussian_copula(u)

    def test_rejects_single_column(self):
        with pytest.raises(InvalidInput, match="2 columns"):
            copula.fit_gaussian_copula(np.linspace(0.1, 0.9, 10)[:, None])

    def test_rejects_unknown_method(self):
        u = np.column_stack([np.linspace(0.1, 0.9, 10)] * 2)
        with pytest.raises(InvalidInput, match="fit method"):
            copula.fit_gaussian_copula(u, method="spearman")


class TestSampling:
    def test_deterministic_given_seed(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.6))
        a = copula.sample_gaussian_copula(model, 1000, seed=5)
        b = copula.sample_gaussian_copula(model, 1000, seed=5)
        np.testing.assert_array_equal(a, b)

    def test_seeds_differ(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.6))
        a = copula.sample_gaussian_copula(model, 1000, seed=5)
        b = copula.sample_gaussian_copula(model, 1000, seed=6)
        assert not np.array_equal(a, b)

    def test_output_inside_open_hypercube(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.999))
        u = copula.sample_gaussian_copula(model, 5000, seed=2)
        assert u.shape == (5000, 2)
        assert u.min() > 0.0 and u.max() < 1.0

    def test_high_rho_refit(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.99))
        u = copula.sample_gaussian_copula(model, 200_000, seed=17)
        fit = copula.fit_gaussian_copula(u)
        assert 0.985 <= fit.correlation.values[0, 1] <= 0.995

    def test_singular_model_cannot_sample(self):
        cm = copula.CorrelationMatrix(np.array([[1.0, 1.0], [1.0, 1.0]]))
        model = copula.GaussianCopulaModel(cm)
        with pytest.raises(NotPositiveDefinite, match="cannot sample"):
            copula.sample_gaussian_copula(model, 10, seed=0)

    def test_rejects_nonpositive_count(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.5))
        with pytest.raises(InvalidInput):
            copula.sample_gaussian_copula(model, 0, seed=0)


class TestDensity:
    def test_independence_is_flat(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.0))
        pts = np.array([[0.5, 0.5], [0.1, 0.9], [0.3, 0.2]])
        np.testing.assert_allclose(
            copula.gaussian_copula_density(model, pts), 1.0, rtol=1e-14
        )

    def test_center_value(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.5))
        value = copula.gaussian_copula_density(model, np.array([0.5, 0.5]))
        assert value == pytest.approx(1.0 / math.sqrt(0.75), rel=1e-14)

    def test_matches_density_ratio_oracle(self):
        # c(u) = phi_R(z) / prod_i phi(z_i) with z = quantile(u)
        rng = np.random.default_rng(31)
        for _ in range(100):
            rho = float(rng.uniform(-0.95, 0.95))
            corr = np.array([[1.0, rho], [rho, 1.0]])
            model = copula.GaussianCopulaModel(copula.CorrelationMatrix(corr))
            u = rng.uniform(0.02, 0.98, size=2)
            z = copula.std_normal_quantile(u)
            expected = multivariate_normal(cov=corr).pdf(z) / np.prod(norm.pdf(z))
            got = copula.gaussian_copula_density(model, u)
            np.testing.assert_allclose(got, expected, rtol=1e-10)

    def test_exchange_symmetry(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.7))
        a = copula.gaussian_copula_density(model, np.array([0.2, 0.8]))
        b = copula.gaussian_copula_density(model, np.array([0.8, 0.2]))
        assert a == pytest.approx(b, rel=1e-13)

    @pytest.mark.parametrize("rho", [0.0, 0.5, 0.9])
    def test_midpoint_integral_near_one(self, rho):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(rho))
        b = 200
        centers = (np.arange(b) + 0.5) / b
        pts = np.stack(np.meshgrid(centers, centers, indexing="ij"), axis=-1)
        values = copula.gaussian_copula_density(model, pts.reshape(-1, 2))
        assert values.sum() / b**2 == pytest.approx(1.0, abs=0.01)

    def test_scalar_for_single_point(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.4))
        assert isinstance(
            copula.gaussian_copula_density(model, np.array([0.3, 0.6])), float
        )

    def test_boundary_point_rejected(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.4))
        with pytest.raises(BoundaryPoint):
            copula.gaussian_copula_density(model, np.array([0.0, 0.5]))
        with pytest.raises(BoundaryPoint):
            copula.gaussian_copula_density(model, np.array([0.5, 1.0]))

    def test_singular_model_has_no_density(self):
        cm = copula.CorrelationMatrix(np.array([[1.0, 1.0], [1.0, 1.0]]))
        model = copula.GaussianCopulaModel(cm)
        with pytest.raises(NotPositiveDefinite, match="no density"):
            copula.gaussian_copula_density(model, np.array([0.5, 0.5]))

    def test_wrong_width_rejected(self):
        model = copula.GaussianCopulaModel(copula.bivariate_correlation(0.4))
        with pytest.raises(InvalidInput):
            copula.gaussian_copula_density(model, np.array([0.1, 0.2, 0.3]))


class TestHistogram:
    def test_two_point_example(self):
        u = copula.pseudo_observations(np.array([[1.0, 1.0], [2.0, 2.0]]))
        hist = copula.empirical_copula_histogram(u, 2)
        np.testing.assert_array_equal(hist.mass, [0.5, 0.0, 0.0, 0.5])

    def test_mass_sums_to_one(self):
        rng = np.random.default_rng(4)
        u = copula.pseudo_observations(rng.standard_normal((777, 2)))
        hist = copula.empirical_copula_histogram(u, 16)
        assert hist.mass.sum() == pytest.approx(1.0, abs=1e-12)
        assert hist.mass.min() >= 0.0

    def test_independent_data_fills_cells_evenly(self):
        rng = np.random.default_rng(8)
        u = copula.pseudo_observations(rng.standard_normal((100_000, 2)))
        hist = copula.empirical_copula_histogram(u, 16)
        np.testing.assert_allclose(hist.mass, 1.0 / 256.0, atol=0.002)

    def test_marginals_near_uniform(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            t = int(rng.integers(64, 2000))
            b = int(rng.choice([2, 4, 8, 16]))
            u = copula.pseudo_observations(rng.standard_normal((t, 2)))
            grid = copula.empirical_copula_histogram(u, b).grid()
            bound = 2.0 * b / t + 1e-12
            for axis in range(2):
                marginal = grid.sum(axis=1 - axis)
                assert np.abs(marginal - 1.0 / b).max() <= bound

    def test_values_near_one_land_in_last_cell(self):
        u = np.array([[0.999999, 0.999999], [0.1, 0.1], [0.5, 0.4]])
        hist = copula.empirical_copula_histogram(u, 4)
        assert hist.grid()[3, 3] == pytest.approx(1.0 / 3.0)

    def test_grid_budget_enforced(self):
        u = np.column_stack([np.linspace(0.1, 0.9, 10)] * 2)
        with pytest.raises(GridTooLarge):
            copula.empirical_copula_histogram(u, 2048)

    def test_budget_boundary_allowed(self):
        copula.validate_grid(1024, 2)
        with pytest.raises(GridTooLarge):
            copula.validate_grid(1025, 2)

    def test_rejects_single_bin(self):
        with pytest.raises(InvalidInput):
            copula.validate_grid(1, 2)

    def test_three_dimensional_histogram(self):
        rng = np.random.default_rng(21)
        u = copula.pseudo_observations(rng.standard_normal((5000, 3)))
        hist = copula.empirical_copula_histogram(u, 4)
        assert hist.shape == (4, 4, 4)
        assert hist.mass.sum() == pytest.approx(1.0, abs=1e-12)

    def test_axis_and_cell_centers(self):
        hist = copula.comonotone_histogram(4)
        np.testing.assert_allclose(hist.axis_centers(), [0.125, 0.375, 0.625, 0.875])
        centers = hist.cell_centers([0, 5, 15])
        np.testing.assert_allclose(
            centers, [[0.125, 0.125], [0.375, 0.375], [0.875, 0.875]]
        )

    def test_validation_of_mass(self):
        with pytest.raises(InvalidInput, match="sums"):
            copula.EmpiricalCopulaHistogram(2, 2, np.array([0.5, 0.5, 0.5, 0.5]))
        with pytest.raises(InvalidInput, match="nonnegative"):
            copula.EmpiricalCopulaHistogram(2, 2, np.array([1.5, -0.5, 0.0, 0.0]))
        with pytest.raises(InvalidInput, match="cells"):
            copula.EmpiricalCopulaHistogram(2, 2, np.array([1.0, 0.0]))


class TestComonotoneHistogram:
    def test_two_bins(self):
        hist = copula.comonotone_histogram(2)
        np.testing.assert_array_equal(hist.mass, [0.5, 0.0, 0.0, 0.5])

    def test_four_bins_diagonal(self):
        grid = copula.comonotone_histogram(4).grid()
        np.testing.assert_allclose(np.diag(grid), 0.25)
        assert grid[~np.eye(4, dtype=bool)].max() == 0.0

    def test_three_dimensions(self):
        hist = copula.comonotone_histogram(3, dim=3)
        grid = hist.grid()
        for k in range(3):
            assert grid[k, k, k] == pytest.approx(1.0 / 3.0)
        assert hist.mass.sum() == pytest.approx(1.0, abs=1e-15)


class TestModuleConstants:
    def test_rng_algorithm_name(self):
        assert copula.RNG_ALGORITHM == "pcg64"

    def test_fit_methods(self):
        assert copula.FIT_METHODS == ("normal-scores", "kendall-inversion", "exact")
