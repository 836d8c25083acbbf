"""Distances between dependence structures.

Two families live here. The closed-form family compares Gaussian copulas
through their correlation matrices: Fisher-Rao, Kullback-Leibler,
Jeffreys, Hellinger, Bhattacharyya, and the 2-Wasserstein distance, each
evaluated on the zero-mean Gaussians the copulas are built from. The
nonparametric family is the earth mover's distance between empirical
copula histograms, solved exactly as a minimum-cost flow.

Conventions worth knowing:

* ``hellinger`` is the metric, sqrt(1 - BC). Its square (1 - BC) shows up
  in some published comparisons; :mod:`copulametrics.experiments` reports
  the squared value in its summary table and says so in the table note.
* ``kl`` is asymmetric and therefore rejected by :func:`pairwise_matrix`;
  use ``jeffreys`` when a symmetric divergence is wanted.
* The divergence family (every kind except ``w2`` and ``emd``) treats a
  matrix with an eigenvalue at or below 1e-12 as singular and raises
  :class:`~copulametrics.errors.SingularMatrix`; ``w2`` stays finite on
  the comonotone boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .copula import (
    CorrelationMatrix,
    EmpiricalCopulaHistogram,
    GaussianCopulaModel,
    MAX_GRID_CELLS,
)
from .errors import (
    CopulaMetricsError,
    DomainError,
    GridTooLarge,
    IncompatibleHistograms,
    InvalidDistanceMatrix,
    InvalidInput,
    NotPositiveSemidefinite,
    SingularMatrix,
)

KINDS = ("fisher-rao", "kl", "jeffreys", "hellinger", "bhattacharyya", "w2", "emd")
CLOSED_FORM_KINDS = KINDS[:6]
SYMMETRIC_KINDS = tuple(k for k in KINDS if k != "kl")
GROUNDS = ("euclidean", "manhattan")


def _as_matrix(obj, name: str) -> np.ndarray:
    """Coerce a model, correlation wrapper, or raw array to a symmetric matrix."""
    if isinstance(obj, GaussianCopulaModel):
        return obj.correlation.values
    if isinstance(obj, CorrelationMatrix):
        return obj.values
    return linalg.as_symmetric(obj, name=name)


def _require_nonsingular(mat: np.ndarray, name: str) -> None:
    min_eig = float(np.linalg.eigvalsh(mat).min())
    if min_eig <= linalg.SINGULAR_EIG:
        raise SingularMatrix(
            f"{name} is numerically singular (min eigenvalue {min_eig:.3e})"
        )


def _require_psd(mat: np.ndarray, name: str) -> None:
    min_eig = float(np.linalg.eigvalsh(mat).min())
    if min_eig < -linalg.PSD_CLAMP:
        raise NotPositiveSemidefinite(
            f"{name} has eigenvalue {min_eig:.3e} below -{linalg.PSD_CLAMP:.0e}"
        )


def _log_det_spd(mat: np.ndarray) -> float:
    return float(np.sum(np.log(np.linalg.eigvalsh(mat))))


def fisher_rao(a, b) -> float:
    """Fisher-Rao distance between N(0, a) and N(0, b).

    sqrt(0.5 * sum(log(lam_i)^2)) over the generalized eigenvalues
    lam_i of the pencil (b, a). Both matrices must be nonsingular.
    """
    s1 = _as_matrix(a, "first matrix")
    s2 = _as_matrix(b, "second matrix")
    _check_same_shape(s1, s2)
    _require_nonsingular(s1, "first matrix")
    _require_nonsingular(s2, "second matrix")
    lower = linalg.cholesky(s1)
    # L^-1 b L^-T shares eigenvalues with a^-1 b but stays symmetric.
    half = np.linalg.solve(lower, s2)
    pencil = np.linalg.solve(lower, half.T).T
    lam = np.linalg.eigvalsh((pencil + pencil.T) / 2.0)
    return float(np.sqrt(0.5 * np.sum(np.log(lam) ** 2)))


def kl(a, b) -> float:
    """Kullback-Leibler divergence KL(N(0, a) || N(0, b)).

    The second argument must be nonsingular. A singular (but PSD) first
    argument gives an infinite divergence, returned as ``inf``.
    """
    s1 = _as_matrix(a, "first matrix")
    s2 = _as_matrix(b, "second matrix")
    _check_same_shape(s1, s2)
    _require_psd(s1, "first matrix")
    _require_nonsingular(s2, "second matrix")
    inv_b = linalg.inverse_spd(s2)
    eigs_a = np.linalg.eigvalsh(s1)
    if eigs_a.min() <= linalg.SINGULAR_EIG:
        return math.inf
    n = s1.shape[0]
    value = 0.5 * (
        _log_det_spd(s2) - float(np.sum(np.log(eigs_a))) - n + float(np.trace(inv_b @ s1))
    )
    return max(value, 0.0)


def jeffreys(a, b) -> float:
    """Symmetrised KL divergence: KL(a, b) + KL(b, a)."""
    s1 = _as_matrix(a, "first matrix")
    s2 = _as_matrix(b, "second matrix")
    _check_same_shape(s1, s2)
    _require_nonsingular(s1, "first matrix")
    _require_nonsingular(s2, "second matrix")
    return kl(s1, s2) + kl(s2, s1)


def _log_bhattacharyya_coefficient(s1: np.ndarray, s2: np.ndarray) -> float:
    mid = (s1 + s2) / 2.0
    return (
        0.25 * _log_det_spd(s1) + 0.25 * _log_det_spd(s2) - 0.5 * _log_det_spd(mid)
    )


def bhattacharyya(a, b) -> float:
    """Bhattacharyya distance, -log BC(N(0, a), N(0, b))."""
    s1 = _as_matrix(a, "first matrix")
    s2 = _as_matrix(b, "second matrix")
    _check_same_shape(s1, s2)
    _require_nonsingular(s1, "first matrix")
    _require_nonsingular(s2, "second matrix")
    return max(-_log_bhattacharyya_coefficient(s1, s2), 0.0)


def hellinger(a, b) -> float:
    """Hellinger distance, the metric sqrt(1 - BC(N(0, a), N(0, b))).

    Satisfies the triangle inequality; its square does not. The identity
    ``bhattacharyya == -log(1 - hellinger**2)`` holds by construction.
    """
    s1 = _as_matrix(a, "first matrix")
    s2 = _as_matrix(b, "second matrix")
    _check_same_shape(s1, s2)
    _require_nonsingular(s1, "first matrix")
    _require_nonsingular(s2, "second matrix")
    bc = math.exp(_log_bhattacharyya_coefficient(s1, s2))
    return math.sqrt(max(1.0 - bc, 0.0))


def w2_gaussian(a, b) -> float:
    """2-Wasserstein (Bures) distance between N(0, a) and N(0, b).

    Defined for PSD matrices, including singular ones, so it remains
    finite on the comonotone boundary where the divergences blow up.
    """
    s1 = _as_matrix(a, "first matrix")
    s2 = _as_matrix(b, "second matrix")
    _check_same_shape(s1, s2)
    _require_psd(s1, "first matrix")
    _require_psd(s2, "second matrix")
    root = linalg.sqrt_psd(s1)
    cross = linalg.sqrt_psd(root @ s2 @ root)
    value = float(np.trace(s1) + np.trace(s2) - 2.0 * np.trace(cross))
    return math.sqrt(max(value, 0.0))


def _check_same_shape(s1: np.ndarray, s2: np.ndarray) -> None:
    if s1.shape != s2.shape:
        raise InvalidInput(
            f"matrix shapes differ: {s1.shape} vs {s2.shape}"
        )


def closed_form_distance(kind: str, a, b) -> float:
    """Dispatch to one of the six closed-form distances by name."""
    try:
        func = _CLOSED_FORM[kind]
    except KeyError:
        raise InvalidInput(
            f"unknown closed-form kind {kind!r}; expected one of {CLOSED_FORM_KINDS}"
        ) from None
    return func(a, b)


_CLOSED_FORM = {
    "fisher-rao": fisher_rao,
    "kl": kl,
    "jeffreys": jeffreys,
    "hellinger": hellinger,
    "bhattacharyya": bhattacharyya,
    "w2": w2_gaussian,
}


def cramer_rao_bound(rho: float) -> float:
    """Lower bound on the variance of the correlation estimate at rho.

    (1 - rho^2)^2 / (3 (1 + rho^2)) per observation; multiply by 1/T for
    a sample of size T. Vanishes as |rho| approaches 1, which is why
    near-comonotone structures are the easiest to tell apart.
    """
    rho = float(rho)
    if not -1.0 < rho < 1.0:
        raise DomainError(f"rho must lie strictly inside (-1, 1), got {rho}")
    return (1.0 - rho**2) ** 2 / (3.0 * (1.0 + rho**2))


@dataclass(frozen=True)
class TransportPlan:
    """Optimal transport plan between two histograms.

    ``moves`` holds (source_cell, target_cell, mass) triples over flat
    grid indices, sorted by (source, target); ``cost`` is the objective
    value, which equals the distance.
    """

    moves: tuple[tuple[int, int, float], ...]
    cost: float


@dataclass(frozen=True)
class DistanceMatrix:
    """Labelled symmetric dissimilarity matrix with a zero diagonal."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidDistanceMatrix(f"matrix must be square, got {arr.shape}")
        n = arr.shape[0]
        if len(labels) != n:
            raise InvalidDistanceMatrix(
                f"{len(labels)} labels for a {n}x{n} matrix"
            )
        if len(set(labels)) != n:
            raise InvalidDistanceMatrix("labels must be unique")
        if not np.all(np.isfinite(arr)):
            raise InvalidDistanceMatrix("matrix contains non-finite entries")
        if np.any(arr < 0.0):
            raise InvalidDistanceMatrix("matrix contains negative entries")
        if np.any(np.diag(arr) != 0.0):
            raise InvalidDistanceMatrix("diagonal must be exactly zero")
        scale = max(1.0, float(arr.max()))
        if float(np.max(np.abs(arr - arr.T))) > 1e-12 * scale:
            raise InvalidDistanceMatrix("matrix is not symmetric")
        arr = (arr + arr.T) / 2.0
        arr.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def emd(
    h1: EmpiricalCopulaHistogram,
    h2: EmpiricalCopulaHistogram,
    ground: str = "euclidean",
) -> tuple[float, TransportPlan]:
    """Exact earth mover's distance between two copula histograms.

    Solved as a minimum-cost flow with successive shortest paths, so the
    result matches a linear-programming solution to solver precision.
    The ground metric between bin centers is ``euclidean`` or
    ``manhattan``.

    Raises
    ------
    IncompatibleHistograms
        If the histograms differ in dimension or resolution.
    GridTooLarge
        If the full cost matrix (B^d by B^d) would exceed the cell
        budget, i.e. when B^(2d) > 2^20.
    """
    if not isinstance(h1, EmpiricalCopulaHistogram) or not isinstance(
        h2, EmpiricalCopulaHistogram
    ):
        raise InvalidInput("emd expects two EmpiricalCopulaHistogram inputs")
    if h1.dim != h2.dim or h1.bins_per_axis != h2.bins_per_axis:
        raise IncompatibleHistograms(
            f"histograms differ: dim {h1.dim} vs {h2.dim}, "
            f"bins {h1.bins_per_axis} vs {h2.bins_per_axis}"
        )
    if ground not in GROUNDS:
        raise InvalidInput(f"unknown ground metric {ground!r}; expected {GROUNDS}")
    if abs(float(h1.mass.sum()) - float(h2.mass.sum())) > 1e-9:
        raise InvalidInput("histogram masses differ by more than 1e-9")
    cells = h1.bins_per_axis**h1.dim
    if cells * cells > MAX_GRID_CELLS:
        raise GridTooLarge(
            f"transport over {cells}x{cells} cells exceeds the budget of "
            f"{MAX_GRID_CELLS}; reduce bins_per_axis"
        )

    src = np.flatnonzero(h1.mass > 0.0)
    dst = np.flatnonzero(h2.mass > 0.0)
    pa = h1.cell_centers(src)
    pb = h2.cell_centers(dst)
    diff = pa[:, None, :] - pb[None, :, :]
    if ground == "euclidean":
        cost = np.sqrt(np.sum(diff**2, axis=2))
    else:
        cost = np.sum(np.abs(diff), axis=2)

    total, flow = _min_cost_flow(h1.mass[src], h2.mass[dst], cost)

    moves = []
    rows, cols = np.nonzero(flow > 1e-15)
    for i, j in zip(rows.tolist(), cols.tolist()):
        moves.append((int(src[i]), int(dst[j]), float(flow[i, j])))
    moves.sort()
    plan = TransportPlan(moves=tuple(moves), cost=total)
    return total, plan


def _min_cost_flow(a: np.ndarray, b: np.ndarray, cost: np.ndarray):
    """Successive shortest paths with node potentials on a dense bipartite graph.

    ``a`` and ``b`` are strictly positive supplies and demands with equal
    totals (up to 1e-12); ``cost`` is the (len(a), len(b)) arc cost
    matrix. Returns (objective, flow matrix). Exact for this problem
    class: every augmentation follows a shortest path under reduced
    costs, so the final flow satisfies complementary slackness.
    """
    m, n = cost.shape
    flow = np.zeros((m, n))
    pot_u = np.zeros(m)
    pot_v = np.zeros(n)
    rem_a = a.astype(float).copy()
    rem_b = b.astype(float).copy()
    inf = np.inf
    eps = 1e-15

    while rem_a.sum() > 1e-12 and rem_b.sum() > 1e-12:
        # Dijkstra over reduced costs from all surplus sources at once.
        dist_u = np.where(rem_a > eps, 0.0, inf)
        dist_v = np.full(n, inf)
        par_v = np.full(n, -1, dtype=int)
        par_u = np.full(m, -1, dtype=int)
        done_u = np.zeros(m, dtype=bool)
        done_v = np.zeros(n, dtype=bool)
        target = -1
        while True:
            mu = np.where(done_u, inf, dist_u)
            mv = np.where(done_v, inf, dist_v)
            iu = int(np.argmin(mu))
            jv = int(np.argmin(mv))
            du, dv = mu[iu], mv[jv]
            if du == inf and dv == inf:
                break
            if du <= dv:
                done_u[iu] = True
                reduced = np.maximum(cost[iu] - pot_u[iu] - pot_v, 0.0)
                candidate = du + reduced
                update = (~done_v) & (candidate < dist_v)
                dist_v[update] = candidate[update]
                par_v[update] = iu
            else:
                done_v[jv] = True
                if rem_b[jv] > eps:
                    target = jv
                    break
                # Residual (backward) arcs exist only where flow is positive.
                has_flow = (~done_u) & (flow[:, jv] > eps)
                reduced = np.maximum(-(cost[:, jv] - pot_u - pot_v[jv]), 0.0)
                candidate = dv + reduced
                update = has_flow & (candidate < dist_u)
                dist_u[update] = candidate[update]
                par_u[update] = jv

        if target < 0:
            raise RuntimeError("transport network has no augmenting path")

        dt = dist_v[target]
        pot_u -= np.where(done_u, dist_u, dt)
        pot_v += np.where(done_v, dist_v, dt)

        # Walk the path back from the deficit sink, then push the bottleneck.
        arcs = []
        cur = target
        bottleneck = rem_b[target]
        while True:
            i = par_v[cur]
            arcs.append((i, cur, 1.0))
            if par_u[i] == -1:
                bottleneck = min(bottleneck, rem_a[i])
                break
            arcs.append((i, par_u[i], -1.0))
            bottleneck = min(bottleneck, flow[i, par_u[i]])
            cur = par_u[i]
        for i, j, sign in arcs:
            flow[i, j] += sign * bottleneck
        rem_a[arcs[-1][0]] -= bottleneck
        rem_b[target] -= bottleneck

    return float(np.sum(cost * flow)), flow


def require_symmetric_kind(kind: str) -> None:
    """Reject kinds that cannot fill a symmetric distance matrix."""
    if kind == "kl":
        raise InvalidInput(
            "kl is asymmetric and cannot fill a distance matrix; use jeffreys"
        )
    if kind not in SYMMETRIC_KINDS:
        raise InvalidInput(f"unknown kind {kind!r}; expected one of {SYMMETRIC_KINDS}")


def pairwise_matrix(objects, kind: str, labels=None, ground: str = "euclidean") -> DistanceMatrix:
    """All-pairs distance matrix over models or histograms.

    ``objects`` is a sequence of Gaussian copula models (or correlation
    matrices) for the closed-form kinds, or of histograms for ``emd``.

    ``kl`` is rejected because a distance matrix must be symmetric; the
    error suggests ``jeffreys``. Errors raised on a pair are re-raised
    with both labels attached.
    """
    require_symmetric_kind(kind)
    objects = list(objects)
    n = len(objects)
    if n < 2:
        raise InvalidInput("need at least 2 objects for a distance matrix")
    if labels is None:
        labels = [str(i) for i in range(n)]
    labels = [str(x) for x in labels]
    if len(labels) != n:
        raise InvalidInput(f"{len(labels)} labels for {n} objects")

    if kind == "emd":
        for k, obj in enumerate(objects):
            if not isinstance(obj, EmpiricalCopulaHistogram):
                raise InvalidInput(
                    f"object {labels[k]!r}: emd requires histograms"
                )

    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            try:
                if kind == "emd":
                    d, _ = emd(objects[i], objects[j], ground=ground)
                else:
                    d = closed_form_distance(kind, objects[i], objects[j])
            except CopulaMetricsError as exc:
                raise type(exc)(
                    f"{kind} failed for pair ({labels[i]}, {labels[j]}): {exc}"
                ) from exc
            values[i, j] = values[j, i] = d
    return DistanceMatrix(labels=tuple(labels), values=values)
