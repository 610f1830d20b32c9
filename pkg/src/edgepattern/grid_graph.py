"""Coarse-scale grid graph on the odd-odd diamond centers.

Spanning trees of this graph are in bijection with generalized edge patterns,
so the matrix-tree theorem gives their exact count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .geometry import BoardSpec, LatticePoint

# Catalan's constant; exp(4G/pi) is the per-vertex growth rate of spanning
# trees of large square grids.
CATALAN = 0.915965594177219015054603514932384110774


@dataclass(frozen=True)
class GridGraph:
    """Undirected simple graph given by vertex labels and index-pair arcs.

    Built for the board by :func:`build_grid_graph`; tests also build small
    arbitrary graphs directly.
    """

    vertices: tuple
    arcs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        nv = len(self.vertices)
        for a, b in self.arcs:
            if not (0 <= a < nv and 0 <= b < nv) or a == b:
                raise ValueError(f"bad arc ({a}, {b}) for {nv} vertices")

    @property
    def nu(self) -> int:
        return len(self.vertices)

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per vertex, the list of (arc index, neighbor)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.vertices]
        for k, (a, b) in enumerate(self.arcs):
            adj[a].append((k, b))
            adj[b].append((k, a))
        return adj

    def laplacian(self) -> list[list[int]]:
        nv = self.nu
        lap = [[0] * nv for _ in range(nv)]
        for a, b in self.arcs:
            lap[a][a] += 1
            lap[b][b] += 1
            lap[a][b] -= 1
            lap[b][a] -= 1
        return lap

    def is_connected(self, arc_mask: int | None = None) -> bool:
        """Connectivity using all arcs, or only those whose bit is set."""
        if self.nu == 0:
            return True
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for k, w in adj[v]:
                if (arc_mask is None or arc_mask >> k & 1) and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.nu


def build_grid_graph(spec: BoardSpec) -> GridGraph:
    """Vertices (2a+1, 2b+1) in (a, b) order; arcs sorted by their midpoint.

    Sorting arcs by midpoint makes arc k correspond to the k-th interior
    junction of :func:`geometry.interior_junctions`.
    """
    h = spec.half
    vertices = tuple(LatticePoint(2 * a + 1, 2 * b + 1) for a in range(h) for b in range(h))
    index = {v: k for k, v in enumerate(vertices)}
    pairs = []
    for v in vertices:
        for dx, dy in ((2, 0), (0, 2)):
            w = LatticePoint(v.x + dx, v.y + dy)
            if w in index:
                mid = ((v.x + w.x) // 2, (v.y + w.y) // 2)
                pairs.append((mid, index[v], index[w]))
    pairs.sort()
    return GridGraph(vertices=vertices, arcs=tuple((a, b) for _, a, b in pairs))


def arc_midpoints(g: GridGraph) -> list[LatticePoint]:
    out = []
    for a, b in g.arcs:
        p, q = g.vertices[a], g.vertices[b]
        out.append(LatticePoint((p[0] + q[0]) // 2, (p[1] + q[1]) // 2))
    return out


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    m = [list(map(int, row)) for row in matrix]
    size = len(m)
    if size == 0:
        return 1
    if any(len(row) != size for row in m):
        raise ValueError("matrix must be square")
    sign = 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            for r in range(k + 1, size):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        row_k = m[k]
        for i in range(k + 1, size):
            row_i = m[i]
            f = row_i[k]
            for j in range(k + 1, size):
                # exact division is guaranteed by Sylvester's identity
                row_i[j] = (row_i[j] * pivot - f * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[size - 1][size - 1]


def kirchhoff_count(g: GridGraph) -> int:
    """Exact number of spanning trees (0 for a disconnected graph).

    Deletes the row and column of vertex 0, the lexicographically first one.
    """
    if g.nu == 0:
        return 0
    lap = g.laplacian()
    minor = [row[1:] for row in lap[1:]]
    return bareiss_determinant(minor)


def tree_count_estimate(spec: BoardSpec) -> float:
    """Asymptotic estimate exp(4G/pi * nu), i.e. about 1.3385 ** (n**2).

    Only an order-of-magnitude trend; it is not close to the exact count on
    small boards.
    """
    return math.exp(4.0 * CATALAN / math.pi * spec.nu)


def naive_arc_subset_count(spec: BoardSpec) -> int:
    """Number of (nu-1)-arc subsets a naive generate-and-test would examine."""
    return math.comb(spec.e, spec.nu - 1)


class ScaleRatio(NamedTuple):
    tree_length: int
    path_length: float
    ratio: float


SCALE_RATIO_LIMIT = 1.0 - math.sqrt(2.0) / 4.0


def scale_ratio(spec: BoardSpec) -> ScaleRatio:
    """Tree length 2(nu-1), path length sqrt(2) n^2 and their scale ratio."""
    n2 = spec.squares
    return ScaleRatio(
        tree_length=2 * (spec.nu - 1),
        path_length=math.sqrt(2.0) * n2,
        ratio=(n2 - math.sqrt(2.0) * (spec.nu - 1)) / n2,
    )


@dataclass(frozen=True)
class SpanningTree:
    """Arc subset of the board's grid graph, stored as a bitmask over arc indices."""

    n: int
    mask: int

    @property
    def arcs(self) -> tuple[int, ...]:
        m = self.mask
        return tuple(k for k in range(m.bit_length()) if m >> k & 1)

    def degrees(self, g: GridGraph) -> list[int]:
        deg = [0] * g.nu
        for k in self.arcs:
            a, b = g.arcs[k]
            deg[a] += 1
            deg[b] += 1
        return deg

    def leaf_count(self, g: GridGraph) -> int:
        return sum(1 for d in self.degrees(g) if d == 1)

    def arc_pairs(self, g: GridGraph) -> list[tuple[int, int]]:
        return [g.arcs[k] for k in self.arcs]


def is_spanning_tree(g: GridGraph, mask: int) -> bool:
    if mask >> len(g.arcs):
        return False
    if bin(mask).count("1") != g.nu - 1:
        return False
    return g.is_connected(mask)
