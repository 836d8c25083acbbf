"""Copula data model: rank transforms, Gaussian fits, sampling, histograms.

The package works with dependence structures stripped of their marginals.
Raw series enter through :func:`pseudo_observations`, which maps each
column to average ranks scaled into the open unit interval. From there a
parametric route fits a Gaussian copula (:func:`fit_gaussian_copula`) and
a nonparametric route bins the pseudo-observations into an empirical
copula histogram (:func:`empirical_copula_histogram`).

Sampling is deterministic given a seed: the generator is ``numpy``'s
``default_rng`` (PCG64), uniforms are clipped away from {0, 1} before the
normal quantile is applied, and outputs are clipped into the open unit
hypercube. The generator name is exported as :data:`RNG_ALGORITHM` so
dataset manifests can record it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import kendalltau, rankdata

from . import linalg
from .errors import (
    BoundaryPoint,
    DegenerateInput,
    DomainError,
    GridTooLarge,
    InvalidInput,
    InvalidMatrix,
    NotPositiveDefinite,
    SingularMatrix,
    TooFewSamples,
)

FitMethod = Literal["normal-scores", "kendall-inversion", "exact"]
FIT_METHODS = ("normal-scores", "kendall-inversion", "exact")

RNG_ALGORITHM = "pcg64"

# Hard cap on histogram cells (B ** dim).
MAX_GRID_CELLS = 2**20

# Fitted correlation matrices are projected so their smallest eigenvalue
# is at least this; keeps every fit usable by the closed-form distances.
CORR_EIG_FLOOR = 1e-10

# Open-interval clips used by the sampler.
_UNIFORM_LO = 2.0**-53
_UNIFORM_HI = 1.0 - 2.0**-53
_COPULA_LO = 1e-16
_COPULA_HI = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric matrix with unit diagonal, entries in [-1, 1], PSD.

    The smallest eigenvalue may be negative only within round-off
    (-1e-12); matrices at or beyond the comonotone boundary are still
    valid correlation matrices, they are merely singular.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = linalg.as_symmetric(self.values, name="correlation matrix")
        if arr.shape[0] < 2:
            raise InvalidMatrix("correlation matrix must be at least 2x2")
        if not np.all(np.diag(arr) == 1.0):
            raise InvalidMatrix("correlation matrix must have a unit diagonal")
        off = arr[~np.eye(arr.shape[0], dtype=bool)]
        if off.size and (off.min() < -1.0 or off.max() > 1.0):
            raise InvalidMatrix("correlation entries must lie in [-1, 1]")
        min_eig = float(np.linalg.eigvalsh(arr).min())
        if min_eig < -1e-12:
            raise InvalidMatrix(
                f"correlation matrix is not PSD (min eigenvalue {min_eig:.3e})"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class GaussianCopulaModel:
    """A Gaussian copula, plus provenance of how it was obtained."""

    correlation: CorrelationMatrix
    fit_method: str = "exact"
    sample_size: int | None = None

    def __post_init__(self):
        if self.fit_method not in FIT_METHODS:
            raise InvalidInput(f"unknown fit method {self.fit_method!r}")

    @property
    def dim(self) -> int:
        return self.correlation.dim


@dataclass(frozen=True)
class EmpiricalCopulaHistogram:
    """Probability mass on a regular B^dim grid over the unit hypercube.

    ``mass`` is stored flat in C order; cell ``(i_1, ..., i_d)`` sits at
    flat index ``ravel_multi_index``. Mass is nonnegative and sums to one
    within 1e-12.
    """

    dim: int
    bins_per_axis: int
    mass: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInput("histogram dimension must be at least 1")
        validate_grid(self.bins_per_axis, self.dim)
        arr = np.asarray(self.mass, dtype=float).ravel()
        if arr.size != self.bins_per_axis**self.dim:
            raise InvalidInput(
                f"mass has {arr.size} cells, expected "
                f"{self.bins_per_axis ** self.dim}"
            )
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise InvalidInput("histogram mass must be finite and nonnegative")
        total = float(arr.sum())
        if abs(total - 1.0) > 1e-12:
            raise InvalidInput(f"histogram mass sums to {total!r}, not 1")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "mass", arr)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.bins_per_axis,) * self.dim

    def grid(self) -> np.ndarray:
        """Mass reshaped to the full B^dim grid (a copy)."""
        return self.mass.reshape(self.shape).copy()

    def axis_centers(self) -> np.ndarray:
        """Per-axis bin centers ``(k + 0.5) / B``."""
        b = self.bins_per_axis
        return (np.arange(b) + 0.5) / b

    def cell_centers(self, flat_indices) -> np.ndarray:
        """Coordinates of the given flat cells, shape (n, dim)."""
        idx = np.unravel_index(np.asarray(flat_indices, dtype=int), self.shape)
        return (np.stack(idx, axis=-1) + 0.5) / self.bins_per_axis


def validate_grid(bins_per_axis: int, dim: int) -> None:
    """Check a histogram resolution against the cell budget.

    Raises
    ------
    InvalidInput
        If ``bins_per_axis < 2``.
    GridTooLarge
        If ``bins_per_axis ** dim`` exceeds ``MAX_GRID_CELLS``.
    """
    if bins_per_axis < 2:
        raise InvalidInput("bins_per_axis must be at least 2")
    if bins_per_axis**dim > MAX_GRID_CELLS:
        raise GridTooLarge(
            f"{bins_per_axis}^{dim} cells exceed the budget of {MAX_GRID_CELLS}"
        )


def bivariate_correlation(rho: float) -> CorrelationMatrix:
    """The 2x2 correlation matrix with off-diagonal ``rho``."""
    rho = float(rho)
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [-1, 1], got {rho}")
    return CorrelationMatrix(np.array([[1.0, rho], [rho, 1.0]]))


def std_normal_cdf(x):
    """Standard normal CDF, elementwise."""
    return ndtr(x)


def std_normal_quantile(p):
    """Standard normal quantile (inverse CDF) for p strictly inside (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("quantile argument must lie strictly inside (0, 1)")
    out = ndtri(arr)
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def pseudo_observations(series) -> np.ndarray:
    """Map each column to average ranks scaled by 1 / (T + 1).

    Ties receive their average rank, so the output of a column with
    distinct values is a permutation of ``k / (T + 1)``. The transform is
    invariant under strictly increasing maps applied per column.
    """
    arr = np.asarray(series, dtype=float)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidInput(f"series must be 1-D or 2-D, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise TooFewSamples("need at least 2 observations to rank")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("series contains non-finite values")
    t = arr.shape[0]
    out = np.empty_like(arr)
    for j in range(arr.shape[1]):
        out[:, j] = rankdata(arr[:, j], method="average") / (t + 1)
    return out[:, 0] if squeeze else out


def kendall_to_pearson(tau: float) -> float:
    """Gaussian-copula inversion of Kendall's tau: sin(pi * tau / 2)."""
    tau = float(tau)
    if not -1.0 <= tau <= 1.0:
        raise DomainError(f"tau must lie in [-1, 1], got {tau}")
    return float(np.sin(np.pi * tau / 2.0))


def nearest_correlation(matrix) -> CorrelationMatrix:
    """Project a symmetric matrix onto usable correlation matrices.

    Eigenvalues are floored at ``CORR_EIG_FLOOR`` and the result is
    rescaled to a unit diagonal, so even a comonotone estimate comes out
    strictly positive definite.
    """
    sym = linalg.as_symmetric(matrix, name="correlation estimate")
    values, vectors = np.linalg.eigh(sym)
    values = np.maximum(values, CORR_EIG_FLOOR)
    proj = (vectors * values) @ vectors.T
    scale = np.sqrt(np.diag(proj))
    proj = proj / np.outer(scale, scale)
    proj = np.clip((proj + proj.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(proj, 1.0)
    return CorrelationMatrix(proj)


def _validate_pseudo(u) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if arr.ndim != 2:
        raise InvalidInput(f"pseudo-observations must be 2-D, got shape {arr.shape}")
    if arr.shape[1] < 2:
        raise InvalidInput("need at least 2 columns to fit a copula")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("pseudo-observations contain non-finite values")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise InvalidInput("pseudo-observations must lie strictly inside (0, 1)")
    return arr


def fit_gaussian_copula(u, method: str = "normal-scores") -> GaussianCopulaModel:
    """Fit a Gaussian copula to pseudo-observations.

    Parameters
    ----------
    u : array, shape (T, d)
        Pseudo-observations strictly inside (0, 1).
    method : {"normal-scores", "kendall-inversion"}
        ``normal-scores`` takes the sample correlation of the normal
        scores ``ndtri(u)``. ``kendall-inversion`` estimates pairwise
        Kendall's tau and maps it through ``sin(pi * tau / 2)``.

    The estimate is projected by :func:`nearest_correlation`, so the
    returned model always carries a strictly positive definite matrix.
    """
    if method not in ("normal-scores", "kendall-inversion"):
        raise InvalidInput(f"unknown fit method {method!r}")
    arr = _validate_pseudo(u)
    t, d = arr.shape
    if t < 3:
        raise TooFewSamples(f"need at least 3 observations to fit, got {t}")
    for j in range(d):
        if np.ptp(arr[:, j]) == 0.0:
            raise DegenerateInput(f"column {j} is constant")

    if method == "normal-scores":
        z = ndtri(arr)
        estimate = np.corrcoef(z, rowvar=False)
    else:
        estimate = np.eye(d)
        for i in range(d):
            for j in range(i + 1, d):
                tau = kendalltau(arr[:, i], arr[:, j]).statistic
                estimate[i, j] = estimate[j, i] = kendall_to_pearson(tau)

    correlation = nearest_correlation(estimate)
    return GaussianCopulaModel(correlation, fit_method=method, sample_size=t)


def sample_gaussian_copula(
    model: GaussianCopulaModel, n_samples: int, seed: int
) -> np.ndarray:
    """Draw ``n_samples`` points from the copula, reproducibly.

    The same ``(model, n_samples, seed)`` triple yields bit-identical
    output run after run on the same build: PCG64 uniforms, clipped away
    from {0, 1}, pushed through the normal quantile, correlated with the
    Cholesky factor, and mapped back through the normal CDF. Output lies
    strictly inside the unit hypercube.
    """
    if n_samples < 1:
        raise InvalidInput("n_samples must be positive")
    corr = model.correlation.values
    try:
        lower = linalg.cholesky(corr)
    except NotPositiveDefinite as exc:
        raise NotPositiveDefinite(
            "correlation matrix is singular; cannot sample"
        ) from exc
    rng = np.random.default_rng(seed)
    uniforms = rng.random((n_samples, model.dim))
    uniforms = np.clip(uniforms, _UNIFORM_LO, _UNIFORM_HI)
    z = ndtri(uniforms)
    x = z @ lower.T
    return np.clip(ndtr(x), _COPULA_LO, _COPULA_HI)


def gaussian_copula_density(model: GaussianCopulaModel, u):
    """Copula density c(u) at one point (1-D input) or many (2-D input).

    c(u) = |R|^(-1/2) * exp(-z' (R^(-1) - I) z / 2) with z = ndtri(u).
    """
    arr = np.asarray(u, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != model.dim:
        raise InvalidInput(
            f"points must have {model.dim} coordinates, got shape {np.shape(u)}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("points contain non-finite values")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise BoundaryPoint("density requires points strictly inside (0, 1)^d")

    corr = model.correlation.values
    try:
        inv = linalg.inverse_spd(corr)
    except SingularMatrix as exc:
        raise NotPositiveDefinite(
            "correlation matrix is singular; the copula has no density"
        ) from exc
    det = linalg.det_sym(corr)
    z = ndtri(arr)
    quad = np.einsum("ti,ij,tj->t", z, inv - np.eye(model.dim), z)
    values = np.exp(-0.5 * quad) / np.sqrt(det)
    return float(values[0]) if single else values


def empirical_copula_histogram(u, bins_per_axis: int) -> EmpiricalCopulaHistogram:
    """Bin pseudo-observations into a B^d histogram of total mass one.

    Cell k along an axis covers [k/B, (k+1)/B); the last cell is closed
    at 1 so that values arbitrarily close to 1 still land inside.
    """
    arr = _validate_pseudo(u)
    t, d = arr.shape
    validate_grid(bins_per_axis, d)
    idx = np.minimum(
        (arr * bins_per_axis).astype(int), bins_per_axis - 1
    )
    flat = np.ravel_multi_index(idx.T, (bins_per_axis,) * d)
    mass = np.bincount(flat, minlength=bins_per_axis**d).astype(float) / t
    return EmpiricalCopulaHistogram(dim=d, bins_per_axis=bins_per_axis, mass=mass)


def comonotone_histogram(bins_per_axis: int, dim: int = 2) -> EmpiricalCopulaHistogram:
    """Histogram of the comonotone copula: mass 1/B on each diagonal cell."""
    validate_grid(bins_per_axis, dim)
    mass = np.zeros((bins_per_axis,) * dim)
    diag = (np.arange(bins_per_axis),) * dim
    mass[diag] = 1.0 / bins_per_axis
    return EmpiricalCopulaHistogram(
        dim=dim, bins_per_axis=bins_per_axis, mass=mass.ravel()
    )
