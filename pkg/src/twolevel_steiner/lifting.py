"""Dimension-lifting reductions between two-level and ordinary Steiner trees.

Group i's terminals are lifted to height K in their own extra dimension,
turning the partition structure into plain geometry: a two-level tree of
length L corresponds to a lifted tree of length exactly L + k*K, and any
lifted tree can be brought back.  The return trip runs in three
length-non-increasing steps:

* ``flatten``    pushes every vertex to lifted height 0 or K, one dimension
  at a time.  Removing the straight (height-changing) segments of dimension
  j leaves a forest whose trees each sit at a single height; a minimum s-t
  cut in the auxiliary graph (source = trees at height 0, sink = trees at
  height K, one unit edge per straight segment) decides which trees drop to
  0 and which rise to K.  Edge-disjoint s-t paths each account for at least
  K of straight wire, so the projection never increases length.
* ``normalize_single_edges``   while a dimension has two height-K edges,
  deletes one and reconnects the split components inside a hyperplane; the
  new edge costs at most the base bounding-box semiperimeter <= K.
* ``project_to_two_level``     deletes the k remaining height-K edges and
  reads off the top-level tree, the subtrees, and the connection points.

Lifted vertices are stored as (base point, layer, height): height 0 means
the top-level hyperplane, layer j > 0 with height h means lifted coordinate
h in dimension j.  All operations here preserve that one-hot form; tree
attachments to source and sink are uncapacitated, which pins terminal-
carrying trees to their hyperplane (so terminals never move) without
weakening the length argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from .geometry import (
    Coord,
    EmbeddedTree,
    Edge,
    Point,
    STRAIGHT,
    bounding_box,
    insert_vertex,
    l1_dist,
    tree_length,
    _UnionFind,
)
from .twolevel import Instance, TwoLevelTree


class LiftingError(ValueError):
    """Structural violation in a lifted tree or projection input."""


@dataclass(frozen=True)
class LiftedPoint:
    """A lifted terminal: base point at height K in dimension ``layer``
    (layer 0 = top-level hyperplane, height 0)."""

    base: Point
    layer: int


@dataclass(frozen=True)
class LiftedVertex:
    base: Point
    layer: int
    height: Coord

    def __post_init__(self) -> None:
        if self.layer == 0 and self.height != 0:
            raise LiftingError("layer-0 vertex with nonzero height")
        if self.layer > 0 and self.height == 0:
            raise LiftingError("zero-height vertex must be stored as layer 0")

    def key(self) -> tuple:
        return (self.base.x, self.base.y, self.layer, self.height)


def _edge_length(a: LiftedVertex, b: LiftedVertex) -> Coord:
    base = l1_dist(a.base, b.base)
    if a.layer == b.layer:
        return base + abs(a.height - b.height)
    if a.layer == 0:
        return base + b.height
    if b.layer == 0:
        return base + a.height
    return base + a.height + b.height


@dataclass(frozen=True)
class LiftedTree:
    """A Steiner tree in the lifted space, every edge a single axis-parallel
    segment (in-plane, or height-changing within one lifted dimension)."""

    k: int
    vertices: tuple[LiftedVertex, ...]
    edges: tuple[tuple[int, int], ...]
    terminals: tuple[int, ...]  # vertex indices

    def length(self) -> Coord:
        verts = self.vertices
        return sum(
            (_edge_length(verts[u], verts[v]) for u, v in self.edges), Fraction(0)
        )

    def terminal_points(self) -> list[LiftedPoint]:
        return [
            LiftedPoint(self.vertices[i].base, self.vertices[i].layer)
            for i in self.terminals
        ]

    def lifted_edge_direction(self, u: int, v: int) -> int:
        """The lifted dimension an edge moves in, or 0 for in-plane edges."""
        a, b = self.vertices[u], self.vertices[v]
        if a.layer == b.layer:
            return a.layer if a.height != b.height else 0
        if a.layer == 0:
            return b.layer
        if b.layer == 0:
            return a.layer
        raise LiftingError(f"edge between distinct lifted dimensions {a.layer},{b.layer}")


def validate_lifted(t: LiftedTree, K: Coord) -> list[str]:
    violations = []
    n = len(t.vertices)
    if len({v.key() for v in t.vertices}) != n:
        violations.append("duplicate vertices")
    if len(t.edges) != n - 1:
        violations.append(f"edge count {len(t.edges)} != |V|-1 = {n-1}")
    uf = _UnionFind(n)
    for u, v in t.edges:
        a, b = t.vertices[u], t.vertices[v]
        moves = sum(
            1
            for delta in (
                a.base.x - b.base.x,
                a.base.y - b.base.y,
            )
            if delta != 0
        )
        if a.layer != b.layer and a.layer > 0 and b.layer > 0:
            violations.append(f"edge {u}-{v} spans two lifted dimensions")
            continue
        if a.layer != b.layer or a.height != b.height:
            moves += 1
        if moves != 1:
            violations.append(f"edge {u}-{v} is not a one-directional segment")
        if not uf.union(u, v):
            violations.append(f"edge {u}-{v} closes a cycle")
    if len({uf.find(i) for i in range(n)}) > 1:
        violations.append("not connected")
    for v in t.vertices:
        if not 0 <= v.height <= K:
            violations.append(f"height {v.height} outside [0, K]")
        if not 0 <= v.layer <= t.k:
            violations.append(f"layer {v.layer} outside 0..k")
    return violations


def is_flat(t: LiftedTree, K: Coord) -> bool:
    """Flat = every vertex at height 0, or height exactly K in one dimension."""
    return all(v.height == 0 or v.height == K for v in t.vertices)


def lifted_l1(a: LiftedPoint, b: LiftedPoint, K: Coord) -> Coord:
    """Distance between lifted terminals: same layer keeps the base
    distance; distinct lifted layers add K per height-K coordinate."""
    base = l1_dist(a.base, b.base)
    if a.layer == b.layer:
        return base
    lifted = sum(K for layer in (a.layer, b.layer) if layer != 0)
    return base + lifted


def lift_instance(instance: Instance, K: Coord) -> list[LiftedPoint]:
    """Lifted terminal set: each terminal of group i at height K in
    dimension i (1-based)."""
    if instance.k < 2:
        raise ValueError("lifting needs at least two groups")
    K = Fraction(K)
    semi = bounding_box(instance.all_terminals()).semiperimeter()
    if K < semi:
        raise ValueError(f"K = {K} is smaller than the bounding-box semiperimeter {semi}")
    return [
        LiftedPoint(p, gi + 1)
        for gi, group in enumerate(instance.groups)
        for p in group
    ]


class _LiftedBuilder:
    """Accumulates vertices (dedup by position) and edges for a LiftedTree."""

    def __init__(self, k: int) -> None:
        self.k = k
        self.index: dict[tuple, int] = {}
        self.vertices: list[LiftedVertex] = []
        self.edges: set[tuple[int, int]] = set()
        self.terminals: list[int] = []

    def vertex(self, base: Point, layer: int, height: Coord) -> int:
        if height == 0:
            layer = 0
        v = LiftedVertex(base, layer, height)
        key = v.key()
        i = self.index.get(key)
        if i is None:
            i = len(self.vertices)
            self.index[key] = i
            self.vertices.append(v)
        return i

    def edge(self, u: int, v: int) -> None:
        if u == v:
            return
        self.edges.add((u, v) if u < v else (v, u))

    def mark_terminal(self, idx: int) -> None:
        if idx not in self.terminals:
            self.terminals.append(idx)

    def build(self) -> LiftedTree:
        return LiftedTree(
            self.k,
            tuple(self.vertices),
            tuple(sorted(self.edges)),
            tuple(self.terminals),
        )


def lift_tree(t: TwoLevelTree, K: Coord) -> LiftedTree:
    """Embed a two-level tree in the lifted space: length grows by exactly
    k*K (one height-K edge per connection point).

    Subtree terminals (including the connection points) become lifted
    terminals at their layer, and the connection points additionally at
    layer 0: the conservative choice that keeps every later transformation
    feasibility-preserving for the same instance.
    """
    k = len(t.subtrees)
    if k < 2:
        raise ValueError("lifting needs at least two groups")
    K = Fraction(K)
    builder = _LiftedBuilder(k)

    def add_embedded(tree: EmbeddedTree, layer: int, height: Coord) -> None:
        if not tree.edges:
            for p in tree.vertices:
                builder.vertex(p, layer, height)
            return
        for e in tree.edges:
            for a, b in tree.edge_segments(e):
                ia = builder.vertex(a, layer, height)
                ib = builder.vertex(b, layer, height)
                builder.edge(ia, ib)

    top = t.top
    subtrees = list(t.subtrees)
    for i, q in enumerate(t.connection_points):
        top, _ = insert_vertex(top, q)
        subtrees[i], _ = insert_vertex(subtrees[i], q)
    add_embedded(top, 0, Fraction(0))
    for i, sub in enumerate(subtrees, start=1):
        add_embedded(sub, i, K)
    for i, q in enumerate(t.connection_points, start=1):
        lo = builder.vertex(q, 0, Fraction(0))
        hi = builder.vertex(q, i, K)
        builder.edge(lo, hi)
    for p in top.terminals:
        builder.mark_terminal(builder.vertex(p, 0, Fraction(0)))
    for i, sub in enumerate(subtrees, start=1):
        for p in sub.terminals:
            builder.mark_terminal(builder.vertex(p, i, K))
    return builder.build()


# -- max flow / min cut ---------------------------------------------------------


def max_flow_min_cut(
    edges: Iterable[tuple], s: Hashable, t: Hashable
) -> tuple[int | float, frozenset]:
    """Exact minimum s-t cut of an undirected capacitated graph.

    Edges are (u, v) pairs (capacity 1) or (u, v, capacity) triples;
    parallel edges accumulate.  Augmenting paths are found by BFS
    (Edmonds-Karp), so the run is deterministic: the returned source side
    is the set of vertices reachable from s in the final residual graph.
    """
    cap: dict[Hashable, dict[Hashable, float | int]] = {}

    def add(u, v, c):
        cap.setdefault(u, {})
        cap.setdefault(v, {})
        cap[u][v] = cap[u].get(v, 0) + c
        cap[v][u] = cap[v].get(u, 0) + c

    for edge in edges:
        if len(edge) == 2:
            u, v = edge
            c = 1
        else:
            u, v, c = edge
        if c < 0:
            raise ValueError("negative capacity")
        add(u, v, c)
    if s not in cap or t not in cap:
        raise ValueError("source or sink missing from graph")
    if s == t:
        raise ValueError("source equals sink")

    flow: dict[Hashable, dict[Hashable, float | int]] = {u: {} for u in cap}

    def residual(u, v):
        return cap[u].get(v, 0) - flow[u].get(v, 0)

    total = 0
    while True:
        parent = {s: None}
        queue = [s]
        while queue and t not in parent:
            u = queue.pop(0)
            for v in cap[u]:
                if v not in parent and residual(u, v) > 0:
                    parent[v] = u
                    queue.append(v)
        if t not in parent:
            break
        bottleneck = None
        v = t
        while parent[v] is not None:
            u = parent[v]
            r = residual(u, v)
            bottleneck = r if bottleneck is None else min(bottleneck, r)
            v = u
        assert bottleneck is not None and bottleneck > 0
        if math.isinf(bottleneck):
            raise ValueError("unbounded flow: an all-infinite s-t path exists")
        v = t
        while parent[v] is not None:
            u = parent[v]
            flow[u][v] = flow[u].get(v, 0) + bottleneck
            flow[v][u] = flow[v].get(u, 0) - bottleneck
            v = u
        total += bottleneck
    side = {s}
    queue = [s]
    while queue:
        u = queue.pop(0)
        for v in cap[u]:
            if v not in side and residual(u, v) > 0:
                side.add(v)
                queue.append(v)
    return total, frozenset(side)


# -- flattening -----------------------------------------------------------------


def _vertex_key(v: LiftedVertex) -> tuple:
    return v.key()


def _rebuild(
    k: int,
    vertices: Sequence[LiftedVertex],
    edge_list: Iterable[tuple[int, int]],
    terminals: Sequence[int],
) -> LiftedTree:
    """Merge coincident vertices, drop self-loops and parallel edges, and
    break cycles by discarding the longest edge on each (ties: smallest
    vertex keys win), via a Kruskal pass."""
    key_to_new: dict[tuple, int] = {}
    new_vertices: list[LiftedVertex] = []
    remap = []
    for v in vertices:
        key = v.key()
        idx = key_to_new.get(key)
        if idx is None:
            idx = len(new_vertices)
            key_to_new[key] = idx
            new_vertices.append(v)
        remap.append(idx)
    candidate: set[tuple[int, int]] = set()
    for u, v in edge_list:
        a, b = remap[u], remap[v]
        if a == b:
            continue
        candidate.add((a, b) if a < b else (b, a))
    weighted = sorted(
        candidate,
        key=lambda e: (
            _edge_length(new_vertices[e[0]], new_vertices[e[1]]),
            new_vertices[e[0]].key(),
            new_vertices[e[1]].key(),
        ),
    )
    uf = _UnionFind(len(new_vertices))
    kept = []
    for a, b in weighted:
        if uf.union(a, b):
            kept.append((a, b))
    if len(kept) != len(new_vertices) - 1:
        raise LiftingError("projection produced a disconnected graph")
    new_terminals = []
    for old in terminals:
        idx = remap[old]
        if idx not in new_terminals:
            new_terminals.append(idx)
    return LiftedTree(k, tuple(new_vertices), tuple(sorted(kept)), tuple(new_terminals))


def _flatten_dimension(t: LiftedTree, K: Coord, j: int) -> LiftedTree:
    n = len(t.vertices)
    straight = []
    rest = []
    for u, v in t.edges:
        if t.lifted_edge_direction(u, v) == j:
            straight.append((u, v))
        else:
            rest.append((u, v))
    if not straight:
        return t
    uf = _UnionFind(n)
    for u, v in rest:
        uf.union(u, v)
    comp_of = [uf.find(i) for i in range(n)]

    def height_in_j(v: LiftedVertex) -> Coord:
        return v.height if v.layer == j else Fraction(0)

    comp_height: dict[int, Coord] = {}
    for i, v in enumerate(t.vertices):
        c = comp_of[i]
        h = height_in_j(v)
        if c in comp_height and comp_height[c] != h:
            raise LiftingError("component spans several heights in one dimension")
        comp_height[c] = h

    inf = math.inf
    flow_edges: list[tuple] = []
    for c, h in sorted(comp_height.items()):
        if h == 0:
            flow_edges.append(("s", ("c", c), inf))
        elif h == K:
            flow_edges.append((("c", c), "t", inf))
    for u, v in straight:
        flow_edges.append((("c", comp_of[u]), ("c", comp_of[v]), 1))
    _, source_side = max_flow_min_cut(flow_edges, "s", "t")

    new_height = {
        c: (Fraction(0) if ("c", c) in source_side else Fraction(K))
        for c in comp_height
    }
    moved: list[LiftedVertex] = []
    for i, v in enumerate(t.vertices):
        h = new_height[comp_of[i]]
        if v.layer != j:
            # Trees containing any other-layer vertex sit at height 0 in
            # dimension j and are attached to the source, so they stay put.
            assert h == 0 or height_in_j(v) == h
            moved.append(v)
        elif h == 0:
            moved.append(LiftedVertex(v.base, 0, Fraction(0)))
        else:
            moved.append(LiftedVertex(v.base, j, Fraction(K)))
    return _rebuild(t.k, moved, rest + straight, t.terminals)


def flatten(t: LiftedTree, K: Coord) -> LiftedTree:
    """Push every vertex to lifted height 0 or K without increasing length
    or moving terminals (one min-cut per lifted dimension)."""
    K = Fraction(K)
    problems = validate_lifted(t, K)
    if problems:
        raise LiftingError("; ".join(problems))
    out = t
    for j in range(1, t.k + 1):
        out = _flatten_dimension(out, K, j)
    assert is_flat(out, K)
    return out


def normalize_single_edges(t: LiftedTree, K: Coord) -> LiftedTree:
    """Reduce a flat tree to at most one height-K edge per dimension.

    While some dimension has two such edges, the one with the larger base
    point is deleted (saving K) and the two components are reconnected by
    the in-hyperplane edge between the endpoints of the kept and deleted
    edges that actually spans the split; its length is the base distance,
    at most the bounding-box semiperimeter <= K.
    """
    K = Fraction(K)
    if not is_flat(t, K):
        raise LiftingError("normalize_single_edges expects a flat tree")
    current = t
    while True:
        by_dir: dict[int, list[tuple[int, int]]] = {}
        for u, v in current.edges:
            d = current.lifted_edge_direction(u, v)
            if d > 0:
                by_dir.setdefault(d, []).append((u, v))
        target = None
        for d in sorted(by_dir):
            if len(by_dir[d]) > 1:
                target = d
                break
        if target is None:
            return current
        verts = current.vertices
        dir_edges = sorted(
            by_dir[target], key=lambda e: verts[e[0]].base
        )
        keep = dir_edges[0]
        drop = dir_edges[1]
        remaining = [e for e in current.edges if e != drop]
        uf = _UnionFind(len(verts))
        for u, v in remaining:
            uf.union(u, v)

        def plane_end(edge: tuple[int, int], at_base: bool) -> int:
            u, v = edge
            if (verts[u].height == 0) == at_base:
                return u
            return v

        keep_comp = uf.find(keep[0])
        new_edge = None
        for at_base in (True, False):
            a = plane_end(keep, at_base)
            b = plane_end(drop, at_base)
            if uf.find(b) != keep_comp:
                new_edge = (a, b)
                break
        assert new_edge is not None  # removing a tree edge splits it in two
    # An in-plane reconnection may be diagonal: realize it as an L through
        # a corner vertex in the same hyperplane.
        a, b = new_edge
        va, vb = verts[a], verts[b]
        builder_vertices = list(verts)
        edges = list(remaining)
        if va.base.x != vb.base.x and va.base.y != vb.base.y:
            lo, hi = (va, vb) if va.base < vb.base else (vb, va)
            corner = LiftedVertex(Point(hi.base.x, lo.base.y), lo.layer, lo.height)
            ci = len(builder_vertices)
            builder_vertices.append(corner)
            lo_i = a if lo is va else b
            hi_i = b if lo is va else a
            edges.append((lo_i, ci))
            edges.append((ci, hi_i))
        else:
            edges.append(new_edge)
        current = _rebuild(current.k, builder_vertices, edges, current.terminals)


def project_to_two_level(t: LiftedTree, K: Coord) -> TwoLevelTree:
    """Read a two-level tree off a flat, single-edge-per-dimension lifted
    tree: total length drops by exactly k*K."""
    K = Fraction(K)
    if not is_flat(t, K):
        raise LiftingError("projection expects a flat tree")
    by_dir: dict[int, list[tuple[int, int]]] = {}
    rest = []
    for u, v in t.edges:
        d = t.lifted_edge_direction(u, v)
        if d > 0:
            by_dir.setdefault(d, []).append((u, v))
        else:
            rest.append((u, v))
    problems = []
    for j in range(1, t.k + 1):
        count = len(by_dir.get(j, []))
        if count != 1:
            problems.append(f"dimension {j} has {count} lifted edges, expected 1")
    if problems:
        raise LiftingError("; ".join(problems))

    n = len(t.vertices)
    uf = _UnionFind(n)
    for u, v in rest:
        uf.union(u, v)

    connection = {}
    for j in range(1, t.k + 1):
        (u, v) = by_dir[j][0]
        top_end = u if t.vertices[u].height == 0 else v
        high_end = v if top_end == u else u
        connection[j] = (t.vertices[u].base, uf.find(top_end), uf.find(high_end))

    top_roots = {root for _, root, _ in connection.values()}
    if len(top_roots) != 1:
        raise LiftingError("top-level hyperplane is not a single component")
    top_root = top_roots.pop()

    def component_tree(root: int, terminals: Sequence[Point]) -> EmbeddedTree:
        members = [i for i in range(n) if uf.find(i) == root]
        order = {old: new for new, old in enumerate(members)}
        vertices = tuple(t.vertices[i].base for i in members)
        edges = tuple(
            Edge(order[u], order[v], STRAIGHT)
            for u, v in rest
            if uf.find(u) == root
        )
        return EmbeddedTree(vertices, edges, tuple(terminals))

    terminal_by_layer: dict[int, list[Point]] = {}
    for idx in t.terminals:
        v = t.vertices[idx]
        terminal_by_layer.setdefault(v.layer, []).append(v.base)

    qs = []
    subtrees = []
    for j in range(1, t.k + 1):
        q, t_root, s_root = connection[j]
        if t_root != top_root:
            raise LiftingError(f"dimension {j} edge does not reach the top component")
        group_terms = terminal_by_layer.get(j, [])
        for p in group_terms:
            i = next(
                (
                    i
                    for i in t.terminals
                    if t.vertices[i].layer == j and t.vertices[i].base == p
                ),
            )
            if uf.find(i) != s_root:
                raise LiftingError(
                    f"terminal {p} of dimension {j} is outside its component"
                )
        qs.append(q)
        subtrees.append(component_tree(s_root, list(dict.fromkeys(group_terms + [q]))))
    top = component_tree(top_root, list(dict.fromkeys(terminal_by_layer.get(0, []) + qs)))
    result = TwoLevelTree(top, tuple(subtrees), tuple(qs))
    assert result.total_length() == t.length() - t.k * K
    return result
