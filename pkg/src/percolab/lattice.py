"""Finite boxes of Z^d, edge-indexed configurations, and connectivity.

The box of radius n is the vertex set [-n, n]^d (integer points) with
nearest-neighbour edges.  Vertices are ordered lexicographically by
coordinates and edges lexicographically by (lesser endpoint, axis), which
fixes a deterministic indexing used everywhere downstream.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError

DEFAULT_VERTEX_BUDGET = 10**8


@dataclass(frozen=True)
class LatticeGraph:
    """A finite box [-n, n]^d of Z^d with indexed vertices and edges."""

    dim: int
    radius: int
    vertices: np.ndarray  # (V, d) int coordinates, lexicographic order
    edges: np.ndarray     # (E, 2) vertex indices, e[0] < e[1]
    boundary: np.ndarray  # indices of vertices with a neighbour outside the box
    origin: int = field(default=0)

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_edges(self):
        return self.edges.shape[0]

    def vertex_index(self, coords):
        """Index of the vertex with the given coordinates."""
        coords = np.asarray(coords, dtype=np.int64)
        side = 2 * self.radius + 1
        if np.any(np.abs(coords) > self.radius):
            raise ValueError("coordinates outside the box")
        idx = 0
        for c in coords:
            idx = idx * side + (int(c) + self.radius)
        return int(idx)


def build_box_graph(d, n, vertex_budget=DEFAULT_VERTEX_BUDGET):
    """Construct the box graph of radius n in dimension d.

    Raises BudgetExceededError when (2n+1)^d would exceed `vertex_budget`.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if n < 0:
        raise ValueError("box radius must be >= 0")
    side = 2 * n + 1
    n_vertices = side**d
    if n_vertices > vertex_budget:
        raise BudgetExceededError(
            f"box of radius {n} in dimension {d} has {n_vertices} vertices "
            f"(budget {vertex_budget})"
        )

    axes = [np.arange(-n, n + 1)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    vertices = np.stack([m.ravel() for m in mesh], axis=1).astype(np.int64)

    # strides of the lexicographic vertex indexing
    strides = np.array([side**(d - 1 - a) for a in range(d)], dtype=np.int64)

    edge_list = []
    for v in range(n_vertices):
        coords = vertices[v]
        for axis in range(d):
            if coords[axis] < n:
                edge_list.append((v, v + strides[axis]))
    edges = (
        np.array(edge_list, dtype=np.int64)
        if edge_list
        else np.empty((0, 2), dtype=np.int64)
    )

    if n == 0:
        boundary = np.array([0], dtype=np.int64)
    else:
        boundary = np.flatnonzero(np.abs(vertices).max(axis=1) == n).astype(np.int64)

    origin = int(np.flatnonzero((vertices == 0).all(axis=1))[0])
    return LatticeGraph(dim=d, radius=n, vertices=vertices, edges=edges,
                        boundary=boundary, origin=origin)


def sample_configuration(g, p, rng):
    """Draw one configuration: each edge open independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return rng.random(g.n_edges) < p


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i):
        p = self.parent
        root = i
        while p[root] != root:
            root = p[root]
        while p[i] != root:
            p[i], i = root, p[i]
        return root

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return ri
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]
        return ri

    def connected(self, i, j):
        return self.find(i) == self.find(j)


def open_components(cfg, g):
    """UnionFind over the open edges of a configuration."""
    uf = UnionFind(g.n_vertices)
    edges = g.edges
    for e in np.flatnonzero(cfg):
        uf.union(int(edges[e, 0]), int(edges[e, 1]))
    return uf


def connected(cfg, g, x, y):
    """True iff an open path joins vertices x and y (x == y counts)."""
    if x == y:
        return True
    return open_components(cfg, g).connected(x, y)


def connected_to_boundary(cfg, g):
    """True iff the origin is joined to the box boundary by open edges.

    For n = 0 the origin is its own boundary, so the answer is True.
    """
    if g.radius == 0:
        return True
    uf = open_components(cfg, g)
    root = uf.find(g.origin)
    return any(uf.find(int(b)) == root for b in g.boundary)
