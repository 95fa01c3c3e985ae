"""Diversity-aware corpus sampling: k-means on embeddings, entropy/variance
cluster weighting, largest-remainder allocation and binned stratified
selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateInput, InsufficientMembers


@dataclass(frozen=True)
class ClusterStats:
    cluster_id: int
    n: int
    entropy: float
    variance: float
    weight: float = 0.0
    allocation: int = 0


@dataclass(frozen=True)
class SamplerConfig:
    sample_size: int
    k: int | str = "auto"  # cluster count, or "auto" for elbow selection
    seed: int = 0
    bins: int = 5

    def __post_init__(self):
        if isinstance(self.k, int) and self.k < 1:
            raise ValueError("k must be >= 1")
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")


def kmeans(
    vectors: np.ndarray, k: int, seed: int, max_iter: int = 300
) -> tuple[np.ndarray, np.ndarray, float]:
    """Lloyd's algorithm with greedy farthest-point seeding; deterministic
    for a fixed seed. Returns (assignments, centroids, inertia)."""
    vectors = np.asarray(vectors, dtype=float)
    n = len(vectors)
    if len(np.unique(vectors, axis=0)) < k:
        raise DegenerateInput(f"need at least {k} distinct vectors")

    rng = np.random.default_rng(seed)
    centroids = np.empty((k, vectors.shape[1]))
    centroids[0] = vectors[rng.integers(n)]
    distances = np.linalg.norm(vectors - centroids[0], axis=1)
    for index in range(1, k):
        centroids[index] = vectors[int(np.argmax(distances))]
        distances = np.minimum(
            distances, np.linalg.norm(vectors - centroids[index], axis=1)
        )

    assignments = np.full(n, -1)
    for _ in range(max_iter):
        sq = ((vectors[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assignments = np.argmin(sq, axis=1)
        for cluster in range(k):
            members = vectors[new_assignments == cluster]
            if len(members):
                centroids[cluster] = members.mean(axis=0)
            else:
                # re-seed an empty cluster with the farthest point
                far = int(np.argmax(sq.min(axis=1)))
                centroids[cluster] = vectors[far]
                new_assignments[far] = cluster
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments

    inertia = float(
        ((vectors - centroids[assignments]) ** 2).sum()
    )
    return assignments, centroids, inertia


@dataclass(frozen=True)
class ElbowSelection:
    k: int
    curve: dict[int, float]
    elbow_found: bool


# An elbow counts as real only when its curvature peak explains at least
# this share of the curve's total drop. Smooth convex decay (unclustered
# data) peaks well below it; a genuine elbow concentrates most of the drop
# in one bend.
_ELBOW_PROMINENCE = 0.4


def select_k_elbow(
    vectors: np.ndarray, k_range: Sequence[int], seed: int
) -> ElbowSelection:
    """Pick the k maximizing the discrete second difference of the inertia
    curve; curves without a pronounced elbow are flagged and fall back to a
    small k."""
    ks = sorted(k_range)
    curve = {k: kmeans(vectors, k, seed)[2] for k in ks}
    interior = ks[1:-1]

    values = np.array([curve[k] for k in ks])
    scale = float(values.max() - values.min())
    if not interior or scale < 1e-9:
        return ElbowSelection(k=min(ks), curve=curve, elbow_found=False)

    second_diffs = {
        k: curve[ks[i - 1]] - 2 * curve[k] + curve[ks[i + 1]]
        for i, k in enumerate(ks)
        if 0 < i < len(ks) - 1
    }
    best_k = max(interior, key=lambda k: (second_diffs[k], -k))
    if abs(second_diffs[best_k]) <= 1e-9 * scale:
        # straight-line decay: every interior k ties at zero curvature
        return ElbowSelection(k=interior[0], curve=curve, elbow_found=False)
    if second_diffs[best_k] < _ELBOW_PROMINENCE * scale:
        return ElbowSelection(k=min(ks), curve=curve, elbow_found=False)
    return ElbowSelection(k=best_k, curve=curve, elbow_found=True)


def cluster_stats(
    member_vectors: np.ndarray,
    centroid: np.ndarray,
    bins: int = 5,
    cluster_id: int = 0,
) -> ClusterStats:
    """Size, Shannon entropy (natural log) of the binned distance-to-centroid
    histogram, and mean squared distance to the centroid."""
    member_vectors = np.asarray(member_vectors, dtype=float)
    if len(member_vectors) == 0:
        raise ValueError("cluster must be non-empty")
    distances = np.linalg.norm(member_vectors - centroid, axis=1)
    variance = float((distances**2).mean())

    max_distance = float(distances.max())
    if max_distance == 0.0:
        entropy = 0.0
    else:
        counts, _ = np.histogram(distances, bins=bins, range=(0.0, max_distance))
        p = counts[counts > 0] / len(distances)
        entropy = float(-(p * np.log(p)).sum())
    return ClusterStats(
        cluster_id=cluster_id, n=len(member_vectors), entropy=entropy, variance=variance
    )


def cluster_weights(stats: Sequence[ClusterStats], total: Optional[int] = None) -> np.ndarray:
    """Normalized weights proportional to entropy x variance x relative size;
    falls back to proportional-by-size when all raw weights vanish."""
    n = np.array([s.n for s in stats], dtype=float)
    if total is None:
        total = n.sum()
    raw = np.array([s.entropy * s.variance for s in stats]) * n / total
    if raw.sum() == 0:
        return n / n.sum()
    return raw / raw.sum()


def allocate(weights: Sequence[float], sample_size: int) -> list[int]:
    """Largest-remainder rounding of weight x sample_size quotas.

    Remaining seats go to the largest fractional parts; ties break toward
    the larger weight, then the lower cluster id. Allocations sum exactly
    to sample_size.
    """
    weights = np.asarray(weights, dtype=float)
    quotas = weights * sample_size
    floors = np.floor(quotas).astype(int)
    remaining = sample_size - int(floors.sum())
    order = sorted(
        range(len(weights)),
        key=lambda i: (-(quotas[i] - floors[i]), -weights[i], i),
    )
    result = floors.tolist()
    for i in order[:remaining]:
        result[i] += 1
    return result


def stratified_sample(
    members: Sequence[tuple[str, int]],
    allocation: int,
    bins: int,
    seed: int,
) -> list[str]:
    """Sample `allocation` member ids, spread across word-count quantile bins
    proportionally to bin size (largest remainder), uniform within each bin.
    Deterministic for a fixed seed."""
    if allocation > len(members):
        raise InsufficientMembers(
            f"requested {allocation} from a cluster of {len(members)}"
        )
    if allocation == len(members):
        return [doc_id for doc_id, _ in members]

    ordered = sorted(members, key=lambda m: (m[1], m[0]))
    chunks = [list(chunk) for chunk in np.array_split(np.arange(len(ordered)), bins)]
    chunks = [c for c in chunks if c]

    sizes = np.array([len(c) for c in chunks], dtype=float)
    seats = allocate(sizes / sizes.sum(), allocation)

    # cap seats at bin size and push overflow to bins with spare capacity
    overflow = 0
    for i, chunk in enumerate(chunks):
        if seats[i] > len(chunk):
            overflow += seats[i] - len(chunk)
            seats[i] = len(chunk)
    while overflow > 0:
        for i, chunk in enumerate(chunks):
            if overflow == 0:
                break
            if seats[i] < len(chunk):
                seats[i] += 1
                overflow -= 1

    rng = np.random.default_rng(seed)
    selected: list[str] = []
    for chunk, count in zip(chunks, seats):
        picked = rng.choice(len(chunk), size=count, replace=False)
        selected.extend(ordered[chunk[j]][0] for j in sorted(picked))
    return selected


def build_cluster_report(
    vectors: np.ndarray,
    ids: Sequence[str],
    word_counts: Sequence[int],
    config: SamplerConfig,
    k_range: Sequence[int] = range(2, 9),
) -> tuple[list[ClusterStats], list[str], Optional[ElbowSelection]]:
    """Cluster the corpus, compute weights/allocations, and draw the sample."""
    vectors = np.asarray(vectors, dtype=float)
    elbow = None
    if config.k == "auto":
        elbow = select_k_elbow(vectors, k_range, config.seed)
        k = elbow.k
    else:
        k = int(config.k)

    assignments, centroids, _ = kmeans(vectors, k, config.seed)
    stats = [
        cluster_stats(
            vectors[assignments == cluster],
            centroids[cluster],
            bins=config.bins,
            cluster_id=cluster,
        )
        for cluster in range(k)
    ]
    weights = cluster_weights(stats)
    allocations = allocate(weights, config.sample_size)

    stats = [
        ClusterStats(
            cluster_id=s.cluster_id,
            n=s.n,
            entropy=s.entropy,
            variance=s.variance,
            weight=float(w),
            allocation=a,
        )
        for s, w, a in zip(stats, weights, allocations)
    ]

    sample: list[str] = []
    for s in stats:
        member_ids = [
            (ids[i], word_counts[i]) for i in np.flatnonzero(assignments == s.cluster_id)
        ]
        sample.extend(
            stratified_sample(member_ids, s.allocation, config.bins, config.seed + s.cluster_id)
        )
    return stats, sample, elbow
