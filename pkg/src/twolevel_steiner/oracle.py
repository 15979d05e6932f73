"""Exact solvers at desk scale.

``exact_rsmt`` computes a minimum rectilinear Steiner tree by running the
Dreyfus-Wagner dynamic program over the grid induced by the terminals'
coordinates (which always contains an optimum).  ``exact_two_level``
solves the two-level problem exactly by lifting: the grid is replicated
into k+1 layers (layer 0 = top level), every grid vertex of layer i > 0
is joined to its layer-0 copy by an edge of weight K = bounding-box
semiperimeter + 1, and an ordinary exact Steiner tree is computed for the
lifted terminals.  Because K strictly exceeds the semiperimeter, a minimum
tree uses exactly one inter-layer edge per layer, so it projects back to a
two-level tree of length (lifted length) - k*K, which is optimal.

The dynamic program is the classic one: best[S][v] = cost of an optimal
tree spanning terminal subset S plus vertex v, built by merging disjoint
subsets at v and relaxing through all-pairs shortest paths.  Subset sizes
here are tiny (<= 9 terminals) but the layered graphs reach a few hundred
vertices, so the merge/relax steps run vectorized over numpy float64
arrays.  All weights are integers (coordinates are pre-scaled by the lcm
of their denominators) and a magnitude guard keeps every intermediate
value below 2^52, where float64 arithmetic on integers is exact; larger
coordinates fall back to a pure-python integer implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from heapq import heappop, heappush
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _sp_dijkstra

from .geometry import (
    BEND_HV,
    Coord,
    Edge,
    EmbeddedTree,
    HananGrid,
    Point,
    STRAIGHT,
    bounding_box,
    hanan_grid,
    l1_dist,
    make_edge,
    tree_length,
)
from .lifting import LiftedTree, LiftedVertex, project_to_two_level
from .twolevel import Instance, TwoLevelTree

DEFAULT_EXACT_LIMIT = 9
DEFAULT_GROUP_LIMIT = 4

# Above this total weight the float64 fast path is no longer exact.
_FLOAT_EXACT_BOUND = 1 << 51


class ExactSizeError(ValueError):
    """Instance exceeds the exact solver's size limits."""


def u_bound(k: int) -> Fraction:
    """Upper bound ceil(sqrt(k-2))/2 + 3/4 on the ratio of a minimum
    rectilinear Steiner tree over the bounding-box semiperimeter, for k
    terminals.

    Defined for k >= 2; note the bound is informative only for k >= 3 (two
    distinct points always have ratio exactly 1).
    """
    if k < 2:
        raise ValueError("u_bound requires k >= 2")
    m = k - 2
    root = math.isqrt(m)
    if root * root < m:
        root += 1
    return Fraction(root, 2) + Fraction(3, 4)


@dataclass(frozen=True)
class GridGraph:
    """An indexed weighted graph over (layered) grid vertices.

    ``points`` maps vertex index -> (base point, layer); weights are the
    integer-scaled L1 lengths (inter-layer edges weigh the scaled K).
    """

    points: tuple[tuple[Point, int], ...]
    edges: tuple[tuple[int, int, int], ...]  # (u, v, integer weight)
    scale: int

    @property
    def vertex_count(self) -> int:
        return len(self.points)

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)


def _scale_of(values: Iterable[Fraction]) -> int:
    return math.lcm(*(v.denominator for v in values)) if values else 1


def _scaled(v: Fraction, scale: int) -> int:
    return v.numerator * (scale // v.denominator)


def _grid_graph(grid: HananGrid, layers: int, layer_weight: int | None, scale: int) -> GridGraph:
    xs = [_scaled(x, scale) for x in grid.xs]
    ys = [_scaled(y, scale) for y in grid.ys]
    nx, ny = len(xs), len(ys)
    per_layer = nx * ny

    def vid(layer: int, ix: int, iy: int) -> int:
        return layer * per_layer + ix * ny + iy

    points = []
    for layer in range(layers):
        for ix in range(nx):
            for iy in range(ny):
                points.append((Point(grid.xs[ix], grid.ys[iy]), layer))
    edges = []
    for layer in range(layers):
        for ix in range(nx):
            for iy in range(ny):
                if ix + 1 < nx:
                    edges.append((vid(layer, ix, iy), vid(layer, ix + 1, iy), xs[ix + 1] - xs[ix]))
                if iy + 1 < ny:
                    edges.append((vid(layer, ix, iy), vid(layer, ix, iy + 1), ys[iy + 1] - ys[iy]))
    if layers > 1:
        assert layer_weight is not None
        for layer in range(1, layers):
            for base in range(per_layer):
                edges.append((base, layer * per_layer + base, layer_weight))
    return GridGraph(tuple(points), tuple(edges), scale)


# -- Dreyfus-Wagner -------------------------------------------------------------


def _steiner_tree_numpy(graph: GridGraph, terminals: Sequence[int]) -> tuple[int, list[tuple[int, int]]]:
    n = graph.vertex_count
    rows = [u for u, v, _ in graph.edges] + [v for u, v, _ in graph.edges]
    cols = [v for u, v, _ in graph.edges] + [u for u, v, _ in graph.edges]
    data = [w for _, _, w in graph.edges] * 2
    mat = csr_matrix((data, (rows, cols)), shape=(n, n))
    dist, pred = _sp_dijkstra(mat, directed=False, return_predecessors=True)

    def path_edges(src: int, dst: int) -> list[tuple[int, int]]:
        out = []
        cur = dst
        while cur != src:
            prev = pred[src, cur]
            out.append((int(prev), int(cur)))
            cur = prev
        return out

    terms = list(terminals)
    root = terms[-1]
    rest = terms[:-1]
    m = len(rest)
    if m == 0:
        return 0, []

    full = (1 << m) - 1
    best = np.full((full + 1, n), np.inf)
    split = np.full((full + 1, n), -1, dtype=np.int64)
    walk = np.full((full + 1, n), -1, dtype=np.int64)
    for i, tid in enumerate(rest):
        best[1 << i] = dist[tid]
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        merged = np.full(n, np.inf)
        sub = (mask - 1) & mask
        while sub:
            other = mask ^ sub
            if sub < other:
                cand = best[sub] + best[other]
                better = cand < merged
                merged[better] = cand[better]
                split[mask][better] = sub
            sub = (sub - 1) & mask
        through = merged[:, None] + dist
        grown = through.min(axis=0)
        attach = through.argmin(axis=0)
        improved = grown < merged
        walk[mask][improved] = attach[improved]
        best[mask] = np.minimum(merged, grown)

    value = best[full][root]
    assert math.isfinite(value)

    edges: set[tuple[int, int]] = set()

    def norm(e: tuple[int, int]) -> tuple[int, int]:
        return e if e[0] < e[1] else (e[1], e[0])

    stack = [(full, root)]
    while stack:
        mask, v = stack.pop()
        if mask & (mask - 1) == 0:
            tid = rest[mask.bit_length() - 1]
            for e in path_edges(tid, v):
                edges.add(norm(e))
            continue
        u = int(walk[mask][v])
        if u >= 0:
            for e in path_edges(u, v):
                edges.add(norm(e))
            stack.append((mask, u))
            continue
        s = int(split[mask][v])
        assert s > 0
        stack.append((s, v))
        stack.append((mask ^ s, v))
    return int(value), sorted(edges)


def _steiner_tree_python(graph: GridGraph, terminals: Sequence[int]) -> tuple[int, list[tuple[int, int]]]:
    """Pure-integer reference implementation (also the big-coordinate path)."""
    n = graph.vertex_count
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u, v, w in graph.edges:
        adj[u].append((v, w))
        adj[v].append((u, w))

    terms = list(terminals)
    root = terms[-1]
    rest = terms[:-1]
    m = len(rest)
    if m == 0:
        return 0, []

    INF = graph.total_weight() + 1
    full = (1 << m) - 1
    best = [[INF] * n for _ in range(full + 1)]
    parent: list[list[tuple | None]] = [[None] * n for _ in range(full + 1)]
    for i, tid in enumerate(rest):
        best[1 << i][tid] = 0
    for mask in range(1, full + 1):
        row = best[mask]
        prow = parent[mask]
        sub = (mask - 1) & mask
        while sub:
            other = mask ^ sub
            if sub < other:
                srow, orow = best[sub], best[other]
                for v in range(n):
                    cand = srow[v] + orow[v]
                    if cand < row[v]:
                        row[v] = cand
                        prow[v] = ("split", sub, v)
            sub = (sub - 1) & mask
        heap = [(d, v) for v, d in enumerate(row) if d < INF]
        import heapq

        heapq.heapify(heap)
        while heap:
            d, v = heappop(heap)
            if d > row[v]:
                continue
            for u, w in adj[v]:
                nd = d + w
                if nd < row[u]:
                    row[u] = nd
                    prow[u] = ("walk", v, u)
                    heappush(heap, (nd, u))

    value = best[full][root]
    assert value < INF
    edges: set[tuple[int, int]] = set()

    def norm(e: tuple[int, int]) -> tuple[int, int]:
        return e if e[0] < e[1] else (e[1], e[0])

    stack = [(full, root)]
    while stack:
        mask, v = stack.pop()
        step = parent[mask][v]
        if step is None:
            assert mask & (mask - 1) == 0 and v == rest[mask.bit_length() - 1]
            continue
        kind, a, b = step
        if kind == "walk":
            edges.add(norm((a, b)))
            stack.append((mask, a))
        else:
            stack.append((a, v))
            stack.append((mask ^ a, v))
    return value, sorted(edges)


def _steiner_tree(graph: GridGraph, terminals: Sequence[int]) -> tuple[int, list[tuple[int, int]]]:
    """Minimum Steiner tree connecting the given vertices; returns the exact
    integer length and the tree's edge list."""
    distinct = list(dict.fromkeys(terminals))
    if len(distinct) <= 1:
        return 0, []
    if graph.total_weight() * 2 < _FLOAT_EXACT_BOUND:
        value, edges = _steiner_tree_numpy(graph, distinct)
    else:
        value, edges = _steiner_tree_python(graph, distinct)
    weight = {tuple(sorted((u, v))): w for u, v, w in graph.edges}
    used = {u for e in edges for u in e}
    total = sum(weight[e] for e in edges)
    if total != value or len(edges) != len(used) - 1:
        raise AssertionError("dynamic program reconstruction is inconsistent")
    return value, edges


# -- public exact solvers ---------------------------------------------------------


def exact_rsmt(points: Iterable[Point], limit: int = DEFAULT_EXACT_LIMIT) -> EmbeddedTree:
    """Minimum-length rectilinear Steiner tree (vertices on the coordinate
    grid of the inputs).  Refuses more than ``limit`` distinct terminals."""
    pts = sorted(set(points))
    if not pts:
        raise ValueError("empty point set")
    if len(pts) > limit:
        raise ExactSizeError(
            f"{len(pts)} terminals exceed the exact solver limit of {limit}"
        )
    if len(pts) == 1:
        return EmbeddedTree.single_vertex(pts[0])
    if len(pts) == 2:
        return EmbeddedTree(
            (pts[0], pts[1]),
            (make_edge(0, 1, pts[0], pts[1], BEND_HV),),
            (pts[0], pts[1]),
        )
    grid = hanan_grid(pts)
    scale = _scale_of([*grid.xs, *grid.ys])
    graph = _grid_graph(grid, 1, None, scale)
    position = {p: i for i, (p, _) in enumerate(graph.points)}
    terminal_ids = [position[p] for p in pts]
    _, edge_list = _steiner_tree(graph, terminal_ids)
    used = sorted({u for e in edge_list for u in e})
    order = {old: new for new, old in enumerate(used)}
    vertices = tuple(graph.points[i][0] for i in used)
    edges = tuple(Edge(order[u], order[v], STRAIGHT) for u, v in edge_list)
    return EmbeddedTree(vertices, edges, tuple(pts))


def exact_two_level(
    instance: Instance,
    limit: int = DEFAULT_EXACT_LIMIT,
    group_limit: int = DEFAULT_GROUP_LIMIT,
) -> tuple[TwoLevelTree, Coord]:
    """Optimal two-level tree and its length, via the layered lifted grid."""
    total = instance.terminal_count()
    if total > limit:
        raise ExactSizeError(
            f"{total} terminals exceed the exact solver limit of {limit}"
        )
    if instance.k > group_limit:
        raise ExactSizeError(
            f"{instance.k} groups exceed the exact solver limit of {group_limit}"
        )
    if instance.k == 1:
        subtree = exact_rsmt(instance.groups[0], limit=limit)
        q = min(instance.groups[0])
        top = EmbeddedTree.single_vertex(q, (q,))
        tree = TwoLevelTree(top, (subtree,), (q,))
        return tree, tree.total_length()

    terminals = instance.all_terminals()
    grid = hanan_grid(terminals)
    scale = _scale_of([*grid.xs, *grid.ys])
    K = bounding_box(terminals).semiperimeter() + 1
    K_scaled = _scaled(K, scale)
    k = instance.k
    graph = _grid_graph(grid, k + 1, K_scaled, scale)

    per_layer = grid.vertex_count
    position = {p: i for i, (p, layer) in enumerate(graph.points) if layer == 0}
    terminal_ids = []
    for gi, group in enumerate(instance.groups, start=1):
        for p in group:
            terminal_ids.append(gi * per_layer + position[p])
    _, edge_list = _steiner_tree(graph, terminal_ids)

    used = sorted({u for e in edge_list for u in e})
    order = {old: new for new, old in enumerate(used)}
    lifted_vertices = []
    for i in used:
        p, layer = graph.points[i]
        height = Fraction(0) if layer == 0 else K
        lifted_vertices.append(LiftedVertex(p, layer, height))
    lifted = LiftedTree(
        k,
        tuple(lifted_vertices),
        tuple((order[u], order[v]) for u, v in edge_list),
        tuple(order[t] for t in dict.fromkeys(terminal_ids)),
    )
    tree = project_to_two_level(lifted, K)
    return tree, tree.total_length()
