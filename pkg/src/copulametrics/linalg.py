"""Dense symmetric-matrix kernels used by the closed-form distances.

Everything in this module operates on small matrices (the dependence
structures we care about rarely go past a few dozen variables, and the
constructors cap the size at 64). Numerical work is delegated to LAPACK
through ``numpy.linalg``; this module adds the validation, the error
taxonomy, and the tolerance policy that the rest of the package relies on.

Conventions
-----------
* Eigenvalues are reported in descending order; ``eigenvectors[:, k]``
  pairs with ``eigenvalues[k]``.
* Matrices are symmetrised (``(a + a.T) / 2``) after validation, so
  downstream code never sees the asymmetric round-off of the caller.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    InvalidMatrix,
    NotPositiveDefinite,
    NotPositiveSemidefinite,
    SingularMatrix,
)

MAX_DIM = 64

# Relative asymmetry allowed before a matrix is rejected.
SYMMETRY_TOL = 1e-12

# Below this eigenvalue a matrix is treated as singular for inversion
# and for the divergence-family distances.
SINGULAR_EIG = 1e-12

# Eigenvalues in [-PSD_CLAMP, 0) are treated as round-off and clamped
# to zero by sqrt_psd; anything more negative is a hard error.
PSD_CLAMP = 1e-12

# A Cholesky pivot whose square falls at or below this floor means the
# factorisation is numerically meaningless even if LAPACK completed.
CHOLESKY_PIVOT_FLOOR = 1e-14


class EigenDecomposition(NamedTuple):
    """Spectral factorisation of a symmetric matrix.

    ``matrix == eigenvectors @ diag(eigenvalues) @ eigenvectors.T`` up to
    round-off, with orthonormal columns and descending eigenvalues.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_symmetric(a, *, name: str = "matrix") -> np.ndarray:
    """Validate ``a`` as a finite symmetric square matrix and symmetrise it.

    Raises
    ------
    InvalidMatrix
        If the input is not square, contains NaN or infinity, is larger
        than ``MAX_DIM`` on a side, or is asymmetric beyond round-off.
    """
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidMatrix(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise InvalidMatrix(f"{name} must be non-empty")
    if arr.shape[0] > MAX_DIM:
        raise InvalidMatrix(
            f"{name} has {arr.shape[0]} rows; at most {MAX_DIM} are supported"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(arr))))
    if float(np.max(np.abs(arr - arr.T))) > SYMMETRY_TOL * scale:
        raise InvalidMatrix(f"{name} is not symmetric")
    return (arr + arr.T) / 2.0


def eigen_sym(a) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending."""
    sym = as_symmetric(a)
    values, vectors = np.linalg.eigh(sym)
    order = np.argsort(values)[::-1]
    return EigenDecomposition(values[order], vectors[:, order])


def cholesky(a) -> np.ndarray:
    """Lower-triangular factor L with ``L @ L.T == a``.

    Raises
    ------
    NotPositiveDefinite
        If the factorisation fails or any pivot squared falls at or
        below ``CHOLESKY_PIVOT_FLOOR``.
    """
    sym = as_symmetric(a)
    try:
        lower = np.linalg.cholesky(sym)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    if np.any(np.diag(lower) ** 2 <= CHOLESKY_PIVOT_FLOOR):
        raise NotPositiveDefinite(
            "matrix is numerically semidefinite (pivot below floor)"
        )
    return lower


def sqrt_psd(a) -> np.ndarray:
    """Symmetric square root of a positive semidefinite matrix.

    Eigenvalues in ``[-PSD_CLAMP, 0)`` are treated as round-off and
    clamped to zero before taking square roots.
    """
    sym = as_symmetric(a)
    values, vectors = np.linalg.eigh(sym)
    if np.any(values < -PSD_CLAMP):
        raise NotPositiveSemidefinite(
            f"matrix has eigenvalue {values.min():.3e} below -{PSD_CLAMP:.0e}"
        )
    values = np.clip(values, 0.0, None)
    root = (vectors * np.sqrt(values)) @ vectors.T
    return (root + root.T) / 2.0


def det_sym(a) -> float:
    """Determinant of a symmetric matrix via its eigenvalues."""
    sym = as_symmetric(a)
    return float(np.prod(np.linalg.eigvalsh(sym)))


def inverse_spd(a) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix.

    The residual ``a @ inverse_spd(a) - I`` sits at the float64 floor of
    roughly ``dim * cond(a) * machine_eps``; around 1e-8 up to condition
    1e6 and around 1e-6 at condition 1e10. No double-precision result
    can do better, because the floor is set by rounding the exact
    inverse's entries.

    Raises
    ------
    SingularMatrix
        If the smallest eigenvalue is at or below ``SINGULAR_EIG``.
    """
    sym = as_symmetric(a)
    values, vectors = np.linalg.eigh(sym)
    if values.min() <= SINGULAR_EIG:
        raise SingularMatrix(
            f"matrix is numerically singular (min eigenvalue {values.min():.3e})"
        )
    inv = (vectors / values) @ vectors.T
    return (inv + inv.T) / 2.0
