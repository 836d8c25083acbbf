"""Copula distances and dependence-based clustering for multivariate series.

The package separates what a series does marginally from how its
components move together, compares the togetherness part with a family
of closed-form Gaussian distances or an exact earth mover's distance,
and clusters collections of series by those distances.

Typical use::

    from copulametrics import (
        pseudo_observations, fit_gaussian_copula, fisher_rao, run_pipeline,
    )

    u = pseudo_observations(series)          # (T, d) ranks in (0, 1)
    model = fit_gaussian_copula(u)           # Gaussian copula
    d = fisher_rao(model, other_model)       # scalar distance

The same functionality is exposed through the ``copulametrics`` command
line and, for multi-client setups, an HTTP service
(``copulametrics serve``).
"""

from .clustering import Dendrogram, Merge, Partition, cut, ward_linkage
from .copula import (
    CorrelationMatrix,
    EmpiricalCopulaHistogram,
    GaussianCopulaModel,
    RNG_ALGORITHM,
    bivariate_correlation,
    comonotone_histogram,
    empirical_copula_histogram,
    fit_gaussian_copula,
    gaussian_copula_density,
    kendall_to_pearson,
    nearest_correlation,
    pseudo_observations,
    sample_gaussian_copula,
    std_normal_cdf,
    std_normal_quantile,
)
from .distances import (
    DistanceMatrix,
    TransportPlan,
    bhattacharyya,
    closed_form_distance,
    cramer_rao_bound,
    emd,
    fisher_rao,
    hellinger,
    jeffreys,
    kl,
    pairwise_matrix,
    w2_gaussian,
)
from .experiments import (
    BenchmarkDataset,
    closed_form_table,
    generate_benchmark,
    run_pipeline,
    sweep,
)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "BenchmarkDataset",
    "CorrelationMatrix",
    "Dendrogram",
    "DistanceMatrix",
    "EmpiricalCopulaHistogram",
    "GaussianCopulaModel",
    "Merge",
    "Partition",
    "RNG_ALGORITHM",
    "TransportPlan",
    "bhattacharyya",
    "bivariate_correlation",
    "closed_form_distance",
    "closed_form_table",
    "comonotone_histogram",
    "cramer_rao_bound",
    "cut",
    "emd",
    "empirical_copula_histogram",
    "errors",
    "fisher_rao",
    "fit_gaussian_copula",
    "gaussian_copula_density",
    "generate_benchmark",
    "hellinger",
    "jeffreys",
    "kendall_to_pearson",
    "kl",
    "nearest_correlation",
    "pairwise_matrix",
    "pseudo_observations",
    "run_pipeline",
    "sample_gaussian_copula",
    "std_normal_cdf",
    "std_normal_quantile",
    "sweep",
    "w2_gaussian",
    "ward_linkage",
]
