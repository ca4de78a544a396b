"""Weighted surface graph and shortest-path primitives (SSSP, multi-source, APSP).

The graph's edges are exactly the unique triangle edges of the mesh, weighted
by the Euclidean distance between their endpoints, so shortest paths measure
geodesic distance along the surface rather than straight-line distance.
"""
from __future__ import annotations

from dataclasses import dataclass
from heapq import heappop, heappush
from pathlib import Path

import numpy as np

from .mesh_io import TriangleMesh

UNREACHABLE = np.inf
MIN_EDGE_WEIGHT_MM = 1e-9
APSP_VERTEX_CAP = 20000


class SurfaceGraph:
    """Undirected weighted graph over mesh vertices; immutable after construction.

    Stores a symmetric CSR adjacency plus the vertex positions (mm). All
    shortest-path operations are read-only, so one graph can be shared by
    concurrent workers.
    """

    def __init__(self, positions, edge_u, edge_v, edge_weights):
        positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
        u = np.asarray(edge_u, dtype=np.int64).ravel()
        v = np.asarray(edge_v, dtype=np.int64).ravel()
        w = np.asarray(edge_weights, dtype=np.float64).ravel()
        n = len(positions)
        if not (len(u) == len(v) == len(w)):
            raise ValueError("edge arrays must have equal length")
        if len(u) and (u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(u == v):
            raise ValueError("self-loops are not allowed")
        if np.any(w <= 0):
            raise ValueError("edge weights must be positive")

        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        key = lo * n + hi
        if len(np.unique(key)) != len(key):
            raise ValueError("duplicate edges are not allowed")
        order = np.argsort(key, kind="stable")
        self._eu = lo[order]
        self._ev = hi[order]
        self._ew = w[order]

        du = np.concatenate([self._eu, self._ev])
        dv = np.concatenate([self._ev, self._eu])
        dw = np.concatenate([self._ew, self._ew])
        idx = np.lexsort((dv, du))
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(du, minlength=n), out=self.indptr[1:])
        self.neighbor_indices = dv[idx]
        self.neighbor_weights = dw[idx]
        self.positions = positions
        self.vertex_count = n
        self._flat = None

    @property
    def edge_count(self) -> int:
        return len(self._eu)

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Canonical undirected edge arrays (u, v, w) with u < v."""
        return self._eu, self._ev, self._ew

    def neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return self.neighbor_indices[lo:hi], self.neighbor_weights[lo:hi]

    def adjacency_list(self) -> list[list[tuple[int, float]]]:
        out = []
        for u in range(self.vertex_count):
            nbrs, wts = self.neighbors(u)
            out.append([(int(a), float(b)) for a, b in zip(nbrs, wts)])
        return out

    def _flat_adjacency(self):
        # Python lists beat repeated numpy scalar indexing in the Dijkstra loop.
        if self._flat is None:
            self._flat = (self.indptr.tolist(),
                          self.neighbor_indices.tolist(),
                          self.neighbor_weights.tolist())
        return self._flat


@dataclass
class DistanceField:
    """Geodesic distances from one source (or the minimum over several).

    dist is per-vertex distance in mm with UNREACHABLE (inf) for vertices in
    other components. For multi-source fields, nearest_source[v] holds the
    source vertex achieving the minimum (-1 where unreachable).
    """

    sources: tuple[int, ...]
    dist: np.ndarray
    nearest_source: np.ndarray | None = None


def build_graph(mesh: TriangleMesh) -> SurfaceGraph:
    """Graph whose edges are the mesh's unique triangle edges, weighted by length.

    Coincident endpoints give zero-length edges; those are clamped to
    MIN_EDGE_WEIGHT_MM so weights stay strictly positive.
    """
    t = mesh.triangles
    if len(t):
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        e = np.unique(e, axis=0)
        w = np.linalg.norm(mesh.vertices[e[:, 0]] - mesh.vertices[e[:, 1]], axis=1)
        w = np.maximum(w, MIN_EDGE_WEIGHT_MM)
    else:
        e = np.empty((0, 2), dtype=np.int64)
        w = np.empty(0, dtype=np.float64)
    return SurfaceGraph(mesh.vertices, e[:, 0], e[:, 1], w)


def induced_subgraph(graph: SurfaceGraph, vertex_ids) -> SurfaceGraph:
    """Subgraph induced on a sorted set of vertex ids, reindexed to 0..len-1."""
    ids = np.asarray(vertex_ids, dtype=np.int64)
    if len(ids) == 0:
        raise ValueError("vertex set is empty")
    if np.any(np.diff(ids) <= 0):
        raise ValueError("vertex ids must be sorted and unique")
    lookup = np.full(graph.vertex_count, -1, dtype=np.int64)
    lookup[ids] = np.arange(len(ids))
    eu, ev, ew = graph.edges()
    keep = (lookup[eu] >= 0) & (lookup[ev] >= 0)
    return SurfaceGraph(graph.positions[ids], lookup[eu[keep]], lookup[ev[keep]], ew[keep])


def extract_region_subgraph(graph: SurfaceGraph, labels,
                            region: int) -> tuple[SurfaceGraph, np.ndarray]:
    """Subgraph induced on vertices labeled `region`, plus the local->global index map."""
    labels = np.asarray(labels)
    ids = np.flatnonzero(labels == region)
    if len(ids) == 0:
        raise ValueError(f"region {region} not present in labels")
    return induced_subgraph(graph, ids), ids


def sssp(graph: SurfaceGraph, source: int) -> DistanceField:
    """Exact single-source shortest paths (Dijkstra on a binary heap)."""
    n = graph.vertex_count
    source = int(source)
    if not 0 <= source < n:
        raise ValueError(f"source vertex {source} out of range [0, {n})")
    indptr, nbrs, wts = graph._flat_adjacency()
    dist = [UNREACHABLE] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heappop(heap)
        if d > dist[u]:
            continue
        for j in range(indptr[u], indptr[u + 1]):
            v = nbrs[j]
            nd = d + wts[j]
            if nd < dist[v]:
                dist[v] = nd
                heappush(heap, (nd, v))
    return DistanceField((source,), np.asarray(dist))


def multi_source_sssp(graph: SurfaceGraph, sources) -> DistanceField:
    """Per-vertex minimum geodesic distance over several sources.

    nearest_source holds the winning source vertex; exact distance ties go to
    the source earliest in the `sources` list.
    """
    n = graph.vertex_count
    src = [int(s) for s in sources]
    if not src:
        raise ValueError("source list is empty")
    if len(set(src)) != len(src):
        raise ValueError("duplicate sources are not allowed")
    for s in src:
        if not 0 <= s < n:
            raise ValueError(f"source vertex {s} out of range [0, {n})")

    indptr, nbrs, wts = graph._flat_adjacency()
    dist = [UNREACHABLE] * n
    pos = [-1] * n  # winning source's position in the sources list
    heap = []
    for p, s in enumerate(src):
        dist[s] = 0.0
        pos[s] = p
        heappush(heap, (0.0, p, s))
    while heap:
        d, p, u = heappop(heap)
        if d > dist[u] or (d == dist[u] and p > pos[u]):
            continue
        for j in range(indptr[u], indptr[u + 1]):
            v = nbrs[j]
            nd = d + wts[j]
            if nd < dist[v] or (nd == dist[v] and p < pos[v]):
                dist[v] = nd
                pos[v] = p
                heappush(heap, (nd, p, v))

    pos_arr = np.asarray(pos)
    nearest = np.full(n, -1, dtype=np.int64)
    reached = pos_arr >= 0
    nearest[reached] = np.asarray(src)[pos_arr[reached]]
    return DistanceField(tuple(src), np.asarray(dist), nearest)


def apsp(graph: SurfaceGraph, max_vertices: int = APSP_VERTEX_CAP) -> np.ndarray:
    """Dense all-pairs geodesic distance matrix via Floyd-Warshall.

    O(|V|^2) memory; refuses graphs above max_vertices to guard against an
    accidental whole-cortex call. Unreachable pairs carry UNREACHABLE.
    """
    n = graph.vertex_count
    if n > max_vertices:
        raise ValueError(f"graph has {n} vertices, above the APSP cap of {max_vertices}")
    d = np.full((n, n), UNREACHABLE)
    np.fill_diagonal(d, 0.0)
    eu, ev, ew = graph.edges()
    d[eu, ev] = ew
    d[ev, eu] = ew
    for k in range(n):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def dump_distance_field(field: DistanceField, path) -> None:
    """Debug dump: one distance per line, unreachable written as 'inf'."""
    lines = ("inf\n" if np.isinf(x) else f"{float(x)!r}\n" for x in field.dist)
    Path(path).write_text("".join(lines), encoding="utf-8", newline="\n")
