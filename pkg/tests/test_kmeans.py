from itertools import combinations

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings, strategies as st

from geosp import (KmeansConfig, bridge_graph, build_graph, calc_groups,
                   comp_centroids, dumbbell_mesh, kmeanspp_init, multi_source_sssp,
                   parallel_kmeans, perturb_weights, sssp, stop_criterion)
from geosp.kmeans import _repair_empty_clusters, max_centroid_shift_mm
from geosp.oracles import oracle_medoid, oracle_sssp
from geosp.surface_graph import SurfaceGraph

from helpers import bumpy_grid_graph, path_graph

DUMBBELL_PATCH = 16  # vertices per blob of the default dumbbell


def test_config_validation():
    with pytest.raises(ValueError):
        KmeansConfig(k=0)
    with pytest.raises(ValueError):
        KmeansConfig(k=2, max_iterations=0)
    with pytest.raises(ValueError):
        KmeansConfig(k=2, convergence_tolerance_mm=0.0)


# -- k-means++ seeding ---------------------------------------------------------


def test_kmeanspp_single_centroid_reproducible():
    g = bumpy_grid_graph(0)
    c1 = kmeanspp_init(g, 1, rng_seed=123)
    c2 = kmeanspp_init(g, 1, rng_seed=123)
    assert c1 == c2
    assert len(c1) == 1


def test_kmeanspp_k_equals_vertex_count():
    g = path_graph(6)
    centroids = kmeanspp_init(g, 6, rng_seed=0)
    assert sorted(centroids) == list(range(6))


def test_kmeanspp_k_too_large():
    with pytest.raises(ValueError):
        kmeanspp_init(path_graph(3), 4, rng_seed=0)


def test_kmeanspp_second_pick_follows_squared_distances():
    # With the first centroid pinned by exhausting seeds, the second pick's
    # frequencies should follow D(x)^2 computed by the brute-force oracle.
    g = path_graph(6)
    tallies = np.zeros(6)
    firsts = np.zeros(6)
    n_trials = 4000
    for seed in range(n_trials):
        c = kmeanspp_init(g, 2, rng_seed=seed)
        firsts[c[0]] += 1
        tallies[c[1]] += 1
    # aggregate expected distribution over observed first picks
    expected = np.zeros(6)
    for first in range(6):
        d = oracle_sssp(g, first).dist
        expected += firsts[first] * (d * d) / (d * d).sum()
    _, p_value = scipy.stats.chisquare(tallies[expected > 0], expected[expected > 0])
    assert p_value > 0.001


def test_kmeanspp_dumbbell_splits_blobs():
    g = build_graph(dumbbell_mesh())
    hits = sum((c[0] < DUMBBELL_PATCH) != (c[1] < DUMBBELL_PATCH)
               for c in (kmeanspp_init(g, 2, seed) for seed in range(1000)))
    assert hits >= 950


def test_kmeanspp_unreachable_vertices_stay_selectable():
    pos = np.zeros((4, 3))
    pos[:, 0] = [0, 1, 10, 11]
    g = SurfaceGraph(pos, [0, 2], [1, 3], [1.0, 1.0])  # two components
    for seed in range(20):
        centroids = kmeanspp_init(g, 3, rng_seed=seed)
        assert len(set(centroids)) == 3


# -- group assignment ----------------------------------------------------------


def test_calc_groups_single_centroid():
    g = bumpy_grid_graph(1)
    assignment, fallbacks = calc_groups(g, [4])
    assert set(assignment.tolist()) == {0}
    assert fallbacks == 0


def test_calc_groups_tie_rule_on_path():
    assignment, _ = calc_groups(path_graph(5), [0, 4])
    assert assignment.tolist() == [0, 0, 0, 1, 1]


def test_calc_groups_matches_per_centroid_sssp():
    g = bumpy_grid_graph(2, min_side=12, max_side=15)
    rng = np.random.default_rng(7)
    centroids = rng.choice(g.vertex_count, size=5, replace=False).tolist()
    assignment, _ = calc_groups(g, centroids)
    stacked = np.stack([sssp(g, c).dist for c in centroids])
    np.testing.assert_array_equal(assignment, np.argmin(stacked, axis=0))


def test_calc_groups_euclidean_fallback():
    pos = np.zeros((4, 3))
    pos[:, 0] = [0, 1, 5, 6]
    g = SurfaceGraph(pos, [0, 2], [1, 3], [1.0, 1.0])
    assignment, fallbacks = calc_groups(g, [0, 1])  # both centroids in left component
    assert fallbacks == 2
    assert assignment.tolist() == [0, 1, 1, 1]  # right blob snaps to nearest position


# -- medoid updates --------------------------------------------------------------


def test_comp_centroids_path_midpoint():
    g = path_graph(5)
    assignment = np.array([0, 0, 0, 1, 1])
    # {0,1,2} -> symmetric center 1; {3,4} ties and the smaller index wins
    assert comp_centroids(g, assignment, [0, 4]) == [1, 3]


def test_comp_centroids_singleton():
    g = path_graph(3)
    assignment = np.array([0, 1, 0])
    # cluster 1 is the singleton {1}; cluster 0 = {0,2} is disconnected, so the
    # medoid comes from the component holding the previous centroid
    assert comp_centroids(g, assignment, [0, 1]) == [0, 1]
    assert comp_centroids(g, assignment, [2, 1]) == [2, 1]


@pytest.mark.parametrize("seed", range(6))
def test_comp_centroids_matches_repeated_dijkstra(seed):
    g = bumpy_grid_graph(seed, min_side=8, max_side=10)
    rng = np.random.default_rng(seed)
    centroids = rng.choice(g.vertex_count, size=3, replace=False).tolist()
    assignment, _ = calc_groups(g, centroids)
    got = comp_centroids(g, assignment, centroids)
    for cluster_id, medoid in enumerate(got):
        ids = np.flatnonzero(assignment == cluster_id)
        rows = np.stack([sssp(g, int(v)).dist[ids] for v in ids])
        expected = int(ids[int(np.argmin(rows.sum(axis=1)))])
        assert medoid == expected


@pytest.mark.parametrize("seed", range(6))
def test_comp_centroids_matches_bellman_ford_oracle(seed):
    g = bumpy_grid_graph(seed + 50, min_side=7, max_side=9)
    rng = np.random.default_rng(seed)
    centroids = rng.choice(g.vertex_count, size=4, replace=False).tolist()
    assignment, _ = calc_groups(g, centroids)
    got = comp_centroids(g, assignment, centroids)
    for cluster_id, medoid in enumerate(got):
        ids = np.flatnonzero(assignment == cluster_id)
        assert medoid == oracle_medoid(g, ids, previous_centroid=centroids[cluster_id])


def test_comp_centroids_disconnected_uses_previous_component():
    # cluster = two components; medoid must come from the previous centroid's side
    pos = np.zeros((5, 3))
    pos[:, 0] = [0, 1, 2, 50, 51]
    g = SurfaceGraph(pos, [0, 1, 3], [1, 2, 4], [1.0, 1.0, 1.0])
    assignment = np.zeros(5, dtype=int)
    assert comp_centroids(g, assignment, [1]) == [1]
    assert comp_centroids(g, assignment, [4]) == [3]
    assert oracle_medoid(g, np.arange(5), previous_centroid=4) == 3


def test_comp_centroids_empty_cluster_rejected():
    g = path_graph(4)
    with pytest.raises(ValueError, match="empty"):
        comp_centroids(g, np.zeros(4, dtype=int), [0, 3])


# -- stopping -------------------------------------------------------------------


def test_stop_criterion_cases():
    g = path_graph(10)  # 1 mm spacing
    config = KmeansConfig(k=2)
    assert stop_criterion([2, 7], [2, 7], g, 1, config)          # moved 0 mm
    assert not stop_criterion([0, 9], [5, 9], g, 3, config)      # moved 5 mm
    assert stop_criterion([0, 9], [5, 9], g, 20, config)         # iteration cap
    assert stop_criterion([0, 9], [1, 9], g, 3, config)          # 1 mm < 2 mm


def test_max_centroid_shift():
    g = path_graph(10)
    assert max_centroid_shift_mm([0, 3], [2, 3], g) == 2.0


# -- full loop -------------------------------------------------------------------


def test_parallel_kmeans_k1_single_group():
    g = bumpy_grid_graph(3)
    res = parallel_kmeans(g, KmeansConfig(k=1, rng_seed=9))
    assert len(res.groups) == 1
    assert res.groups[0].tolist() == list(range(g.vertex_count))


def test_parallel_kmeans_k_too_large():
    with pytest.raises(ValueError):
        parallel_kmeans(path_graph(3), KmeansConfig(k=4))


def test_bridge_partition_from_any_centroid_pair():
    # exhaustive: every starting pair converges to the two triangles
    g = bridge_graph()
    config = KmeansConfig(k=2)
    expected = [frozenset({0, 1, 2}), frozenset({3, 4, 5})]
    for pair in combinations(range(6), 2):
        centroids = list(pair)
        for it in range(1, config.max_iterations + 1):
            assignment, _ = calc_groups(g, centroids)
            new_centroids = comp_centroids(g, assignment, centroids)
            done = stop_criterion(centroids, new_centroids, g, it, config)
            centroids = new_centroids
            if done:
                break
        groups = sorted((frozenset(np.flatnonzero(assignment == i).tolist())
                         for i in range(2)), key=min)
        assert groups == expected, f"start {pair} settled on {groups}"


def test_bridge_partition_over_seeds():
    g = bridge_graph()
    for seed in range(25):
        res = parallel_kmeans(g, KmeansConfig(k=2, rng_seed=seed))
        groups = sorted((frozenset(grp.tolist()) for grp in res.groups), key=min)
        assert groups == [frozenset({0, 1, 2}), frozenset({3, 4, 5})]


def test_parallel_kmeans_deterministic_and_worker_independent():
    g = bumpy_grid_graph(11, min_side=22, max_side=22)  # ~500 vertices
    config = KmeansConfig(k=5, rng_seed=21)
    a = parallel_kmeans(g, config)
    b = parallel_kmeans(g, config)
    c = parallel_kmeans(g, config, workers=4)
    for x, y, z in zip(a.groups, b.groups, c.groups):
        assert np.array_equal(x, y) and np.array_equal(x, z)
    assert a.centroids == b.centroids == c.centroids


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 6))
def test_groups_partition_vertices(seed, k):
    g = bumpy_grid_graph(seed % 64 + 30, min_side=6, max_side=9)
    res = parallel_kmeans(g, KmeansConfig(k=k, rng_seed=seed))
    allv = np.concatenate(res.groups)
    assert len(allv) == g.vertex_count
    assert len(np.unique(allv)) == g.vertex_count
    assert all(len(grp) > 0 for grp in res.groups)
    assert res.iterations <= 20
    assert res.assignment[res.centroids].tolist() == list(range(k))


def test_assignment_optimality_after_calc_groups():
    g = bumpy_grid_graph(40, min_side=10, max_side=12)
    centroids = kmeanspp_init(g, 6, rng_seed=2)
    assignment, _ = calc_groups(g, centroids)
    field = multi_source_sssp(g, centroids)
    stacked = np.stack([sssp(g, c).dist for c in centroids])
    own = stacked[assignment, np.arange(g.vertex_count)]
    assert np.all(own <= stacked.min(axis=0) + 1e-12)
    np.testing.assert_array_equal(own, field.dist)


def test_medoid_optimality_within_component():
    g = bumpy_grid_graph(41, min_side=8, max_side=8)
    centroids = kmeanspp_init(g, 4, rng_seed=3)
    assignment, _ = calc_groups(g, centroids)
    medoids = comp_centroids(g, assignment, centroids)
    for cluster_id, medoid in enumerate(medoids):
        ids = np.flatnonzero(assignment == cluster_id)
        rows = np.stack([oracle_sssp(g, int(v)).dist[ids] for v in ids])
        sums = np.where(np.isfinite(rows).all(axis=1), rows.sum(axis=1), np.inf)
        best = sums.min()
        medoid_sum = sums[list(ids).index(medoid)]
        assert medoid_sum <= best + 1e-12


def test_groups_connected_under_perturbed_weights():
    for seed in range(5):
        g = perturb_weights(bumpy_grid_graph(seed + 60, min_side=8, max_side=10),
                            rng_seed=seed)
        res = parallel_kmeans(g, KmeansConfig(k=4, rng_seed=seed))
        for grp in res.groups:
            members = set(grp.tolist())
            frontier = {int(grp[0])}
            seen = set(frontier)
            while frontier:
                nxt = set()
                for u in frontier:
                    for v in g.neighbors(u)[0]:
                        v = int(v)
                        if v in members and v not in seen:
                            seen.add(v)
                            nxt.add(v)
                frontier = nxt
            assert seen == members


def test_repair_empty_clusters():
    g = path_graph(8)
    centroids = [0, 1]
    assignment = np.zeros(8, dtype=int)  # cluster 1 artificially empty
    fixed_centroids, fixed_assignment, repaired, _fb, _d = _repair_empty_clusters(
        g, centroids, assignment)
    assert repaired == 1
    assert len(set(fixed_centroids)) == 2
    assert fixed_centroids[1] == 7  # farthest vertex from old centroid 1
    assert set(np.unique(fixed_assignment).tolist()) == {0, 1}


def test_energy_history_recorded():
    g = bumpy_grid_graph(70)
    res = parallel_kmeans(g, KmeansConfig(k=3, rng_seed=1))
    assert len(res.energy_history) == res.iterations
    assert all(e >= 0 for e in res.energy_history)
