"""Agglomerative Ward clustering over a precomputed distance matrix.

Ward's criterion is applied through the Lance-Williams recurrence on
squared dissimilarities:

    d2(k, i+j) = ((n_i + n_k) d2(k, i) + (n_j + n_k) d2(k, j)
                  - n_k d2(i, j)) / (n_i + n_j + n_k)

Merge heights are the square roots of the squared dissimilarity at the
merge. Leaves are numbered 0..N-1 and internal nodes N..2N-2 in merge
order. When several pairs tie for the minimum, the pair with the
lexicographically smallest (left id, right id) merges first, which makes
the tree fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import DistanceMatrix
from .errors import InvalidDistanceMatrix, InvalidK

# Height decreases larger than this flip the monotone flag.
MONOTONE_TOL = 1e-9


@dataclass(frozen=True)
class Merge:
    """One agglomeration step: cluster ids merged, height, merged size."""

    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Full merge history of a Ward run.

    ``monotone`` is False when some merge height drops below its
    predecessor by more than ``MONOTONE_TOL``; Ward linkage should never
    trip it, so a False value signals a defective input matrix.
    """

    n_leaves: int
    merges: tuple[Merge, ...]
    monotone: bool

    @property
    def heights(self) -> tuple[float, ...]:
        return tuple(m.height for m in self.merges)


@dataclass(frozen=True)
class Partition:
    """Flat clustering: ``assignment[i]`` is the cluster of leaf i.

    Cluster labels are ordered by smallest member, so the cluster
    containing leaf 0 is always cluster 0.
    """

    assignment: tuple[int, ...]
    k: int

    def clusters(self) -> tuple[tuple[int, ...], ...]:
        """Members of each cluster, as tuples of leaf ids."""
        groups: list[list[int]] = [[] for _ in range(self.k)]
        for leaf, c in enumerate(self.assignment):
            groups[c].append(leaf)
        return tuple(tuple(g) for g in groups)


def _coerce_distance_matrix(d) -> DistanceMatrix:
    if isinstance(d, DistanceMatrix):
        return d
    arr = np.asarray(d, dtype=float)
    n = arr.shape[0] if arr.ndim == 2 else 0
    return DistanceMatrix(labels=tuple(str(i) for i in range(n)), values=arr)


def ward_linkage(d) -> Dendrogram:
    """Cluster the rows of a distance matrix with Ward's method.

    Accepts a :class:`~copulametrics.distances.DistanceMatrix` or a raw
    symmetric array with a zero diagonal; the array form is validated the
    same way. Complexity is O(N^3), fine for a few hundred objects.
    """
    dm = _coerce_distance_matrix(d)
    n = dm.n
    if n < 2:
        raise InvalidDistanceMatrix("need at least 2 leaves to build a tree")

    # Slot arrays: position in the matrix stays fixed, the cluster id
    # living in a slot changes as merges happen.
    d2 = dm.values.astype(float) ** 2
    np.fill_diagonal(d2, np.inf)
    ids = np.arange(n)
    sizes = np.ones(n)
    active = np.ones(n, dtype=bool)

    merges: list[Merge] = []
    monotone = True
    prev_height = -np.inf

    for step in range(n - 1):
        vmin = d2.min()
        where = np.argwhere(d2 == vmin)
        best = None
        best_slots = None
        for p, q in where:
            if p >= q:
                continue
            lo, hi = sorted((int(ids[p]), int(ids[q])))
            if best is None or (lo, hi) < best:
                best = (lo, hi)
                best_slots = (int(p), int(q))
        p, q = best_slots

        height = float(np.sqrt(max(vmin, 0.0)))
        if height < prev_height - MONOTONE_TOL:
            monotone = False
        prev_height = max(prev_height, height)

        si, sj = sizes[p], sizes[q]
        merges.append(
            Merge(left=best[0], right=best[1], height=height, size=int(si + sj))
        )

        others = active.copy()
        others[p] = others[q] = False
        sk = sizes[others]
        updated = (
            (si + sk) * d2[others, p] + (sj + sk) * d2[others, q] - sk * vmin
        ) / (si + sj + sk)
        d2[others, p] = updated
        d2[p, others] = updated

        active[q] = False
        d2[q, :] = np.inf
        d2[:, q] = np.inf
        ids[p] = n + step
        sizes[p] = si + sj

    return Dendrogram(n_leaves=n, merges=tuple(merges), monotone=monotone)


def cut(tree: Dendrogram, k: int) -> Partition:
    """Flat partition with k clusters, obtained by undoing the last merges.

    ``k = 1`` is everything in one cluster, ``k = N`` is all singletons.
    """
    n = tree.n_leaves
    if not 1 <= k <= n:
        raise InvalidK(f"k must lie in [1, {n}], got {k}")

    members: dict[int, set[int]] = {i: {i} for i in range(n)}
    for step in range(n - k):
        merge = tree.merges[step]
        new_id = n + step
        members[new_id] = members.pop(merge.left) | members.pop(merge.right)

    clusters = sorted(members.values(), key=min)
    assignment = [0] * n
    for label, group in enumerate(clusters):
        for leaf in group:
            assignment[leaf] = label
    return Partition(assignment=tuple(assignment), k=k)
