"""Deterministic 1-D k-means for banding countries by score.

Scores live on a line, so clustering needs no randomness: Lloyd
iteration is seeded with evenly spaced points across the score range,
and its result is then checked against the optimal contiguous partition
of the sorted scores, found by dynamic programming over prefix sums.
In one dimension some optimal clustering is always contiguous, so the
better of the two is optimal whenever they disagree.  Equal inputs give
byte-equal outputs on every run.

Cluster 0 always holds the highest centroid; with k = 3 the bands read
high / mid / low.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean
from typing import Mapping, Sequence

from .errors import ClusteringError, InfeasibleKError


@dataclass(frozen=True)
class ClusterResult:
    k: int
    assignments: Mapping[str, int]
    centroids: tuple[float, ...]
    iterations: int
    converged: bool
    wcss: float


def band_labels(k: int) -> tuple[str, ...]:
    """Human labels per cluster index, highest scores first."""
    if k == 3:
        return ("high", "mid", "low")
    return tuple(f"band_{i + 1}" for i in range(k))


def _nearest(value: float, centroids: Sequence[float]) -> int:
    best = 0
    best_dist = abs(value - centroids[0])
    for j in range(1, len(centroids)):
        dist = abs(value - centroids[j])
        if dist < best_dist:
            best, best_dist = j, dist
    return best


def _wcss(values: Sequence[float], assign: Sequence[int], centroids: Sequence[float]) -> float:
    return sum((v - centroids[a]) ** 2 for v, a in zip(values, assign))


def _lloyd(
    values: Sequence[float], k: int, tol: float, max_iter: int
) -> tuple[list[int], list[float], int, bool]:
    lo, hi = min(values), max(values)
    if k == 1:
        centroids = [fmean(values)]
    else:
        centroids = [lo + i * (hi - lo) / (k - 1) for i in range(k)]
    assign = [0] * len(values)
    iterations = 0
    converged = False
    reseeds = 0
    for iterations in range(1, max_iter + 1):
        assign = [_nearest(v, centroids) for v in values]
        while len(set(assign)) < k:
            if reseeds >= k:
                raise ClusteringError("clusters kept emptying while reseeding")
            empty = min(j for j in range(k) if j not in set(assign))
            far_idx = max(
                range(len(values)),
                key=lambda i: abs(values[i] - centroids[assign[i]]),
            )
            centroids[empty] = values[far_idx]
            reseeds += 1
            assign = [_nearest(v, centroids) for v in values]
        new_centroids = [
            fmean([v for v, a in zip(values, assign) if a == j]) for j in range(k)
        ]
        shift = max(abs(a - b) for a, b in zip(new_centroids, centroids))
        centroids = new_centroids
        if shift <= tol:
            converged = True
            break
    return assign, centroids, iterations, converged


def _optimal_contiguous(values: Sequence[float], k: int) -> tuple[list[int], float]:
    """Optimal k-segment split of sorted values via prefix-sum DP.

    Returns per-position segment indices (ascending by value) and the
    split's within-cluster sum of squares.  O(k * n^2).
    """
    n = len(values)
    pre = [0.0]
    pre2 = [0.0]
    for v in values:
        pre.append(pre[-1] + v)
        pre2.append(pre2[-1] + v * v)

    def seg_cost(i: int, j: int) -> float:
        s = pre[j] - pre[i]
        return max(0.0, (pre2[j] - pre2[i]) - s * s / (j - i))

    inf = float("inf")
    cost = [[inf] * (k + 1) for _ in range(n + 1)]
    back = [[0] * (k + 1) for _ in range(n + 1)]
    cost[0][0] = 0.0
    for j in range(1, k + 1):
        for i in range(j, n + 1):
            for m in range(j - 1, i):
                c = cost[m][j - 1] + seg_cost(m, i)
                if c < cost[i][j]:
                    cost[i][j] = c
                    back[i][j] = m
    segments = [0] * n
    i = n
    for j in range(k, 0, -1):
        m = back[i][j]
        for pos in range(m, i):
            segments[pos] = j - 1
        i = m
    return segments, cost[n][k]


def kmeans_1d(
    scores: Mapping[str, float], k: int, tol: float = 1e-9, max_iter: int = 100
) -> ClusterResult:
    """Cluster id -> score pairs into k bands.

    Raises ``InfeasibleKError`` when fewer than k distinct scores exist
    and ``ClusteringError`` when the result degenerates (equal
    centroids, or reseeding cannot fill every cluster).
    """
    if k < 1:
        raise ClusteringError(f"k must be at least 1, got {k}")
    ids = sorted(scores)
    values = [float(scores[i]) for i in ids]
    if len(set(values)) < k:
        raise InfeasibleKError(
            f"k={k} needs that many distinct scores, have {len(set(values))}"
        )

    assign, centroids, iterations, converged = _lloyd(values, k, tol, max_iter)
    best_wcss = _wcss(values, assign, centroids)

    order = sorted(range(len(ids)), key=lambda i: (values[i], ids[i]))
    segments, dp_wcss = _optimal_contiguous([values[i] for i in order], k)
    if dp_wcss < best_wcss - 1e-12:
        assign = [0] * len(ids)
        for pos, i in enumerate(order):
            assign[i] = segments[pos]
        centroids = [
            fmean([values[i] for i in range(len(ids)) if assign[i] == j])
            for j in range(k)
        ]
        best_wcss = _wcss(values, assign, centroids)

    # cluster 0 = highest centroid
    rank = sorted(range(k), key=lambda j: -centroids[j])
    remap = {old: new for new, old in enumerate(rank)}
    final_centroids = tuple(centroids[j] for j in rank)
    for a, b in zip(final_centroids, final_centroids[1:]):
        if a == b:
            raise ClusteringError("clustering collapsed to equal centroids")
    assignments = {cid: remap[assign[i]] for i, cid in enumerate(ids)}
    return ClusterResult(
        k=k,
        assignments=assignments,
        centroids=final_centroids,
        iterations=iterations,
        converged=converged,
        wcss=best_wcss,
    )
