"""Brute-force reference implementations used to cross-check the fast paths.

These deliberately share no shortest-path code with surface_graph: distances
come from whole-edge-array relaxation sweeps (Bellman-Ford style, no priority
queue), and medoids from repeated relaxation sweeps instead of Floyd-Warshall.
They are meant for graphs of a few hundred vertices.
"""
from __future__ import annotations

import numpy as np

from .surface_graph import DistanceField, SurfaceGraph, UNREACHABLE, induced_subgraph


def oracle_sssp(graph: SurfaceGraph, source: int) -> DistanceField:
    """Single-source distances by relaxing every edge until a fixed point."""
    n = graph.vertex_count
    source = int(source)
    if not 0 <= source < n:
        raise ValueError(f"source vertex {source} out of range [0, {n})")
    eu, ev, ew = graph.edges()
    u2 = np.concatenate([eu, ev])
    v2 = np.concatenate([ev, eu])
    w2 = np.concatenate([ew, ew])
    dist = np.full(n, UNREACHABLE)
    dist[source] = 0.0
    while True:
        nd = dist.copy()
        np.minimum.at(nd, v2, dist[u2] + w2)
        if np.array_equal(nd, dist):
            return DistanceField((source,), dist)
        dist = nd


def oracle_medoid(graph: SurfaceGraph, cluster, previous_centroid: int | None = None) -> int:
    """Cluster member minimizing the sum of geodesic distances to the others.

    Distances are taken within the cluster-induced subgraph. If that subgraph
    is disconnected, the medoid is found on the component holding
    previous_centroid. Ties go to the smallest vertex index.
    """
    ids = np.unique(np.asarray(cluster, dtype=np.int64))
    if len(ids) == 0:
        raise ValueError("cluster is empty")
    if len(ids) == 1:
        return int(ids[0])
    sub = induced_subgraph(graph, ids)

    anchored = previous_centroid is not None and int(previous_centroid) in set(ids.tolist())
    anchor = int(np.searchsorted(ids, previous_centroid)) if anchored else 0
    reach = np.isfinite(oracle_sssp(sub, anchor).dist)
    members = np.flatnonzero(reach)
    if not anchored and len(members) != len(ids):
        raise ValueError("cluster subgraph is disconnected and no previous centroid given")
    sums = np.array([oracle_sssp(sub, int(c)).dist[members].sum() for c in members])
    return int(ids[members[int(np.argmin(sums))]])
