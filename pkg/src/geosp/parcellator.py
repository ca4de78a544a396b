"""Atlas-mode and whole-mode orchestration producing a global Parcellation.

Atlas mode runs one k-means per labeled region as independent parallel tasks;
whole mode runs one k-means per hemisphere. Each task draws its RNG seed from
the base seed XOR a hash of its region id, so results never depend on worker
count, scheduling, or which other regions are in the plan.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .kmeans import KmeansConfig, parallel_kmeans
from .mesh_io import TriangleMesh
from .surface_graph import build_graph, extract_region_subgraph
from .util import derive_seed


@dataclass
class Parcellation:
    """Per-vertex global sub-parcel ids plus the (region, local cluster) provenance.

    Global ids are contiguous 0..P-1; two vertices share an id iff they share
    (region, local cluster).
    """

    sub_parcel: np.ndarray
    provenance: dict[int, tuple[int, int]]

    @property
    def parcel_count(self) -> int:
        return len(self.provenance)

    def parcel_sizes(self) -> np.ndarray:
        return np.bincount(self.sub_parcel, minlength=self.parcel_count)


@dataclass
class AtlasPlan:
    """Requested sub-parcel count per region id."""

    k_by_region: dict[int, int]

    def __post_init__(self):
        for region, k in self.k_by_region.items():
            if k < 1:
                raise ValueError(f"region {region}: k must be >= 1, got {k}")

    @classmethod
    def uniform(cls, labels, k: int) -> "AtlasPlan":
        return cls({int(r): int(k) for r in np.unique(np.asarray(labels))})

    @classmethod
    def from_file(cls, path) -> "AtlasPlan":
        plan: dict[int, int] = {}
        for no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                if len(parts) != 2:
                    raise ValueError
                region, k = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{no}: expected 'region_id k', got {line!r}") from None
            if region in plan:
                raise ValueError(f"{path}:{no}: duplicate region {region}")
            plan[region] = k
        if not plan:
            raise ValueError(f"{path}: empty plan")
        return cls(plan)


@dataclass
class RegionRun:
    """Diagnostics for one region/hemisphere task."""

    region: int
    k: int
    vertex_count: int
    iterations: int
    converged_by_tolerance: bool
    euclidean_fallbacks: int
    seconds: float


@dataclass
class ParcellationResult:
    parcellation: Parcellation
    runs: list[RegionRun]
    total_seconds: float

    def summary(self) -> dict:
        """JSON-ready run summary (counts, per-region iterations and timings)."""
        p = self.parcellation
        return {
            "sub_parcel_count": p.parcel_count,
            "parcel_sizes": [int(s) for s in p.parcel_sizes()],
            "total_seconds": round(self.total_seconds, 6),
            "regions": [
                {
                    "region": r.region,
                    "k": r.k,
                    "vertices": r.vertex_count,
                    "iterations": r.iterations,
                    "converged_by_tolerance": r.converged_by_tolerance,
                    "euclidean_fallbacks": r.euclidean_fallbacks,
                    "seconds": round(r.seconds, 6),
                }
                for r in self.runs
            ],
        }


def _run_tasks(graph, labels, tasks, config, pool_workers, inner_workers):
    """Run (region, k) clustering tasks; returns per-task (groups, RegionRun).

    Tasks are pure and merged in task order, so any pool size gives the same
    result.
    """

    def one(task):
        region, k = task
        sub, idmap = extract_region_subgraph(graph, labels, region)
        cfg = replace(config, k=k, rng_seed=derive_seed(config.rng_seed, region))
        t0 = time.perf_counter()
        res = parallel_kmeans(sub, cfg, workers=inner_workers)
        dt = time.perf_counter() - t0
        groups = [idmap[g] for g in res.groups]
        return groups, RegionRun(region=region, k=k, vertex_count=len(idmap),
                                 iterations=res.iterations,
                                 converged_by_tolerance=res.converged_by_tolerance,
                                 euclidean_fallbacks=res.euclidean_fallbacks, seconds=dt)

    if pool_workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=pool_workers) as pool:
            return list(pool.map(one, tasks))
    return [one(t) for t in tasks]


def _assemble(vertex_count: int, outputs) -> Parcellation:
    """Assign contiguous global ids in ascending (region, local cluster) order."""
    sub = np.full(vertex_count, -1, dtype=np.int64)
    provenance: dict[int, tuple[int, int]] = {}
    gid = 0
    for (region, _k), (groups, _run) in outputs:
        for local, members in enumerate(groups):
            sub[members] = gid
            provenance[gid] = (region, local)
            gid += 1
    if (sub < 0).any():
        raise AssertionError("parcellation does not cover every vertex")
    return Parcellation(sub, provenance)


def parcellate_atlas_mode(mesh: TriangleMesh, labels, plan: AtlasPlan,
                          config: KmeansConfig | None = None,
                          workers: int = 1) -> ParcellationResult:
    """Subdivide each labeled region into its planned number of sub-parcels.

    The plan must cover exactly the regions present in the labels, and a
    region must have at least k vertices (no silent clamping). Total
    sub-parcel count is the sum of the plan's k values.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != mesh.vertex_count:
        raise ValueError(f"{len(labels)} labels for {mesh.vertex_count} vertices")
    config = config or KmeansConfig(k=1)
    present = [int(r) for r in np.unique(labels)]
    missing = sorted(set(present) - set(plan.k_by_region))
    if missing:
        raise ValueError(f"plan does not cover regions {missing}")
    unknown = sorted(set(plan.k_by_region) - set(present))
    if unknown:
        raise ValueError(f"plan names absent regions {unknown}")
    graph = build_graph(mesh)
    for region in present:
        size = int((labels == region).sum())
        if plan.k_by_region[region] > size:
            raise ValueError(
                f"region {region} has {size} vertices, fewer than k={plan.k_by_region[region]}")

    tasks = [(region, plan.k_by_region[region]) for region in present]
    t0 = time.perf_counter()
    results = _run_tasks(graph, labels, tasks, config,
                         pool_workers=workers, inner_workers=1)
    total = time.perf_counter() - t0
    parcellation = _assemble(mesh.vertex_count, list(zip(tasks, results)))
    return ParcellationResult(parcellation, [r for _g, r in results], total)


def parcellate_whole_mode(mesh: TriangleMesh, hemisphere_labels, k: int,
                          config: KmeansConfig | None = None,
                          workers: int = 1) -> ParcellationResult:
    """Subdivide each hemisphere graph into k sub-parcels, ignoring any atlas.

    hemisphere_labels must carry one or two distinct labels. Parallelism runs
    inside each hemisphere's centroid updates; total sub-parcels = k * number
    of hemispheres.
    """
    hemis = np.asarray(hemisphere_labels, dtype=np.int64)
    if len(hemis) != mesh.vertex_count:
        raise ValueError(f"{len(hemis)} hemisphere labels for {mesh.vertex_count} vertices")
    config = config or KmeansConfig(k=1)
    present = [int(h) for h in np.unique(hemis)]
    if len(present) > 2:
        raise ValueError(f"expected one or two hemisphere labels, got {present}")
    for h in present:
        size = int((hemis == h).sum())
        if k > size:
            raise ValueError(f"hemisphere {h} has {size} vertices, fewer than k={k}")
    graph = build_graph(mesh)

    tasks = [(h, k) for h in present]
    t0 = time.perf_counter()
    # One task per hemisphere; the requested parallelism goes to the
    # per-cluster centroid updates inside each task.
    results = _run_tasks(graph, hemis, tasks, config,
                         pool_workers=min(len(tasks), workers), inner_workers=workers)
    total = time.perf_counter() - t0
    parcellation = _assemble(mesh.vertex_count, list(zip(tasks, results)))
    return ParcellationResult(parcellation, [r for _g, r in results], total)
