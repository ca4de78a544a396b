"""Geodesic graph k-means: k-means++ seeding, nearest-centroid groups, medoid updates.

Centroids are always graph vertices (medoids). Assignment uses multi-source
geodesic distances; centroid updates solve all-pairs shortest paths on each
cluster's induced subgraph and pick the vertex minimizing the distance sum.
All tie-breaking is by smallest index (centroid list position for assignment,
vertex index for medoids), which makes runs bit-reproducible.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .surface_graph import SurfaceGraph, apsp, induced_subgraph, multi_source_sssp, sssp


@dataclass
class KmeansConfig:
    k: int
    max_iterations: int = 20
    convergence_tolerance_mm: float = 2.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.convergence_tolerance_mm <= 0:
            raise ValueError("convergence tolerance must be positive")


@dataclass
class KmeansResult:
    """Final grouping plus run diagnostics."""

    groups: list[np.ndarray]           # per-cluster sorted vertex index arrays
    assignment: np.ndarray             # per-vertex cluster id in [0, k)
    centroids: list[int]               # centroids after the last update step
    iterations: int
    converged_by_tolerance: bool
    last_shift_mm: float
    euclidean_fallbacks: int           # vertices ever assigned by the Euclidean fallback
    repaired_clusters: int
    energy_history: list[float] = field(default_factory=list)


def kmeanspp_init(graph: SurfaceGraph, k: int, rng_seed: int) -> list[int]:
    """k-means++ seeding with geodesic D(x): first centroid uniform, then each
    new centroid drawn with probability proportional to D(x)^2, where D(x) is
    the geodesic distance to the nearest chosen centroid.

    Vertices unreachable from every chosen centroid get D(x) = (max finite
    distance) + 1 mm so they stay selectable. Deterministic given rng_seed.
    """
    n = graph.vertex_count
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must be in [1, {n}]")
    rng = np.random.default_rng(rng_seed)
    first = int(rng.integers(n))
    centroids = [first]
    nearest = sssp(graph, first).dist
    for _ in range(k - 1):
        d = nearest.copy()
        missing = np.isinf(d)
        if missing.any():
            d[missing] = d[~missing].max() + 1.0
        cum = np.cumsum(d * d)
        r = rng.random() * cum[-1]
        nxt = int(np.searchsorted(cum, r, side="right"))
        nxt = min(nxt, n - 1)
        centroids.append(nxt)
        nearest = np.minimum(nearest, sssp(graph, nxt).dist)
    return centroids


def _assign(graph: SurfaceGraph, centroids: list[int]):
    """Nearest-centroid assignment; returns (assignment, fallback count, distances)."""
    field_ = multi_source_sssp(graph, centroids)
    lookup = np.full(graph.vertex_count, -1, dtype=np.int64)
    lookup[np.asarray(centroids)] = np.arange(len(centroids))
    assignment = np.where(field_.nearest_source >= 0,
                          lookup[field_.nearest_source], -1)
    unreached = np.flatnonzero(assignment < 0)
    if len(unreached):
        # Geodesically isolated vertices fall back to ambient Euclidean distance.
        cpos = graph.positions[np.asarray(centroids)]
        diffs = graph.positions[unreached, None, :] - cpos[None, :, :]
        assignment[unreached] = np.argmin(np.einsum("ijk,ijk->ij", diffs, diffs), axis=1)
    return assignment, len(unreached), field_.dist


def calc_groups(graph: SurfaceGraph, centroids: list[int]) -> tuple[np.ndarray, int]:
    """Assign each vertex to the geodesically closest centroid.

    Ties go to the centroid earliest in the list. Vertices unreachable from
    every centroid are assigned by smallest Euclidean distance instead; the
    second return value counts them.
    """
    assignment, fallbacks, _ = _assign(graph, centroids)
    return assignment, fallbacks


def _cluster_medoid(graph: SurfaceGraph, ids: np.ndarray, previous_centroid: int) -> int:
    """Medoid of one cluster via Floyd-Warshall on its induced subgraph."""
    if len(ids) == 1:
        return int(ids[0])
    sub = induced_subgraph(graph, ids)
    dmat = apsp(sub, max_vertices=len(ids))
    where_prev = np.searchsorted(ids, previous_centroid)
    if where_prev < len(ids) and ids[where_prev] == previous_centroid:
        member = np.isfinite(dmat[where_prev])
    elif np.isfinite(dmat).all():
        member = np.ones(len(ids), dtype=bool)
    else:
        raise ValueError("disconnected cluster without its previous centroid")
    sel = np.flatnonzero(member)
    sums = dmat[np.ix_(sel, sel)].sum(axis=1)
    return int(ids[sel[int(np.argmin(sums))]])


def comp_centroids(graph: SurfaceGraph, assignment: np.ndarray,
                   centroids: list[int], workers: int = 1) -> list[int]:
    """Recompute each cluster's centroid as its medoid.

    For a disconnected cluster subgraph the medoid is taken on the component
    containing that cluster's previous centroid. Ties go to the smallest
    vertex index. Clusters are processed independently (optionally in a
    thread pool) and merged in cluster-id order, so output does not depend on
    worker count.
    """
    k = len(centroids)
    clusters = []
    for i in range(k):
        ids = np.flatnonzero(assignment == i)
        if len(ids) == 0:
            raise ValueError(f"cluster {i} is empty; repair before recomputing centroids")
        clusters.append(ids)
    if workers > 1 and k > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda args: _cluster_medoid(graph, *args),
                                 zip(clusters, centroids)))
    return [_cluster_medoid(graph, ids, prev) for ids, prev in zip(clusters, centroids)]


def max_centroid_shift_mm(old: list[int], new: list[int], graph: SurfaceGraph) -> float:
    """Largest Euclidean move between paired old/new centroid positions."""
    if len(old) != len(new):
        raise ValueError("centroid lists must have equal length")
    delta = graph.positions[np.asarray(old)] - graph.positions[np.asarray(new)]
    return float(np.linalg.norm(delta, axis=1).max())


def stop_criterion(old_centroids: list[int], new_centroids: list[int],
                   graph: SurfaceGraph, iteration: int, config: KmeansConfig) -> bool:
    """Stop when every centroid moved less than the tolerance (default 2 mm)
    or the iteration cap (default 20) is reached."""
    if max_centroid_shift_mm(old_centroids, new_centroids, graph) < config.convergence_tolerance_mm:
        return True
    return iteration >= config.max_iterations


def _repair_empty_clusters(graph: SurfaceGraph, centroids: list[int],
                           assignment: np.ndarray):
    """Reseat the centroid of any empty cluster at the vertex farthest from it.

    Cannot occur after a normal assignment step (each centroid is its own
    nearest centroid), but the loop stays safe under arbitrary inputs.
    """
    k = len(centroids)
    repaired = 0
    fallbacks = 0
    dist = None
    while True:
        sizes = np.bincount(assignment, minlength=k)
        empty = np.flatnonzero(sizes == 0)
        if len(empty) == 0:
            return centroids, assignment, repaired, fallbacks, dist
        taken = set(centroids)
        for i in empty:
            score = sssp(graph, centroids[i]).dist.copy()
            score[list(taken)] = -1.0  # keep centroids distinct
            new_c = int(np.argmax(score))  # inf (unreachable) counts as farthest
            taken.add(new_c)
            centroids[int(i)] = new_c
            repaired += 1
        assignment, fallbacks, dist = _assign(graph, centroids)


def parallel_kmeans(graph: SurfaceGraph, config: KmeansConfig,
                    workers: int = 1) -> KmeansResult:
    """Full clustering loop: seed, then alternate assignment and medoid updates
    until centroids move less than the tolerance or the iteration cap hits.

    k=1 short-circuits to a single group holding every vertex. The returned
    groups always partition the vertex set and are identical across reruns
    with the same inputs and any worker count.
    """
    n = graph.vertex_count
    if config.k > n:
        raise ValueError(f"k={config.k} exceeds vertex count {n}")
    if config.k == 1:
        return KmeansResult(groups=[np.arange(n)], assignment=np.zeros(n, dtype=np.int64),
                            centroids=[], iterations=0, converged_by_tolerance=False,
                            last_shift_mm=0.0, euclidean_fallbacks=0, repaired_clusters=0)

    centroids = kmeanspp_init(graph, config.k, config.rng_seed)
    total_fallbacks = 0
    total_repaired = 0
    energy: list[float] = []
    iteration = 0
    shift = float("inf")
    converged = False
    assignment = None
    for iteration in range(1, config.max_iterations + 1):
        assignment, fallbacks, dist = _assign(graph, centroids)
        centroids, assignment, repaired, re_fallbacks, re_dist = _repair_empty_clusters(
            graph, centroids, assignment)
        if repaired:
            fallbacks, dist = re_fallbacks, re_dist
        total_fallbacks += fallbacks
        total_repaired += repaired
        energy.append(float(dist[np.isfinite(dist)].sum()))

        new_centroids = comp_centroids(graph, assignment, centroids, workers=workers)
        shift = max_centroid_shift_mm(centroids, new_centroids, graph)
        converged = stop_criterion(centroids, new_centroids, graph, iteration, config)
        centroids = new_centroids
        if converged:
            break

    groups = [np.flatnonzero(assignment == i) for i in range(config.k)]
    return KmeansResult(groups=groups, assignment=assignment, centroids=centroids,
                        iterations=iteration,
                        converged_by_tolerance=shift < config.convergence_tolerance_mm,
                        last_shift_mm=shift, euclidean_fallbacks=total_fallbacks,
                        repaired_clusters=total_repaired, energy_history=energy)
