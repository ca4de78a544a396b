"""Shared test fixtures: tiny hand-built graphs and randomized bumpy surfaces."""
import numpy as np

from geosp import SurfaceGraph, TriangleMesh, build_graph


def path_graph(n: int, spacing: float = 1.0) -> SurfaceGraph:
    """Vertices on a line, consecutive edges of equal length."""
    positions = np.zeros((n, 3))
    positions[:, 0] = spacing * np.arange(n)
    u = np.arange(n - 1)
    return SurfaceGraph(positions, u, u + 1, np.full(n - 1, spacing))


def right_triangle_mesh() -> TriangleMesh:
    return TriangleMesh(np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]]),
                        np.array([[0, 1, 2]]))


def bumpy_grid_mesh(seed: int, min_side: int = 5, max_side: int = 12) -> TriangleMesh:
    """Grid with random vertical noise: irregular edge weights, no distance ties."""
    rng = np.random.default_rng(seed)
    nx = int(rng.integers(min_side, max_side + 1))
    ny = int(rng.integers(min_side, max_side + 1))
    xs, ys = np.meshgrid(np.arange(nx, dtype=float), np.arange(ny, dtype=float),
                         indexing="xy")
    z = rng.normal(scale=0.4, size=nx * ny)
    vertices = np.column_stack([xs.ravel(), ys.ravel(), z])
    tris = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            a = j * nx + i
            tris.append((a, a + 1, a + nx + 1))
            tris.append((a, a + nx + 1, a + nx))
    return TriangleMesh(vertices, np.asarray(tris))


def bumpy_grid_graph(seed: int, **kw) -> SurfaceGraph:
    return build_graph(bumpy_grid_mesh(seed, **kw))


def brute_force_triangle_edges(mesh: TriangleMesh) -> dict:
    """Reference edge extraction: every triangle side once, weight by endpoint distance."""
    edges = {}
    for i, j, k in mesh.triangles:
        for a, b in ((i, j), (j, k), (k, i)):
            key = (min(a, b), max(a, b))
            edges[key] = float(np.linalg.norm(mesh.vertices[a] - mesh.vertices[b]))
    return edges
