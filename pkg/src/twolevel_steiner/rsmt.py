"""Approximate rectilinear Steiner trees via the rectilinear MST.

The minimum spanning tree under L1 distance is a 3/2-approximation of the
rectilinear Steiner minimal tree, so it serves as the fast subroutine for
the two-level solvers.  A uniform :class:`SteinerSubroutine` descriptor
also selects the exact dynamic-programming solver (guarantee 1) for small
terminal sets, so every solver can be run in either mode.

The MST itself is exact and deterministic:

* candidate edges come from the classic octant-nearest-neighbor sweep
  (4 sweeps over reflections/swaps of the plane, each keeping a staircase
  of undominated points in an ordered map), giving O(n) candidates that
  provably contain an MST;
* for small inputs (<= 64 points) the candidate set is simply all pairs,
  which yields the same tree length;
* Kruskal with edges ordered by (length, endpoint indices) picks the tree.

Coordinates are rescaled to integers (multiplying by the lcm of the
denominators) before the sweep, so all comparisons are exact and fast.

``steinerize`` is an optional post-pass that collapses overlapping
embedded segments into shared wire, introducing Steiner vertices.  It
never increases length, so it preserves the 3/2 guarantee, but it is not
applied implicitly anywhere: the solver guarantees and the worked examples
are stated for plain MST subtrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from sortedcontainers import SortedDict

from .geometry import (
    BEND_HV,
    Coord,
    Edge,
    EmbeddedTree,
    Point,
    STRAIGHT,
    make_edge,
    _UnionFind,
)

RMST_MODE = "rmst"
EXACT_MODE = "exact"

DEFAULT_EXACT_LIMIT = 9

# Below this size the all-pairs candidate set is used; above it, the
# octant sweep.  Both yield a minimum spanning tree.
ALL_PAIRS_LIMIT = 64


@dataclass(frozen=True)
class SteinerSubroutine:
    """Selector for the Steiner-tree subroutine used by the solvers.

    ``rmst`` guarantees length <= 3/2 * optimum at O(n log n) cost;
    ``exact`` guarantees the optimum but refuses terminal sets larger
    than ``exact_limit``.
    """

    mode: str = RMST_MODE
    exact_limit: int = DEFAULT_EXACT_LIMIT

    def __post_init__(self) -> None:
        if self.mode not in (RMST_MODE, EXACT_MODE):
            raise ValueError(f"unknown subroutine mode {self.mode!r}")
        if self.exact_limit < 1:
            raise ValueError("exact size limit must be positive")

    @property
    def alpha(self) -> Fraction:
        """The approximation guarantee of this subroutine."""
        return Fraction(3, 2) if self.mode == RMST_MODE else Fraction(1)

    @staticmethod
    def rmst() -> "SteinerSubroutine":
        return SteinerSubroutine(RMST_MODE)

    @staticmethod
    def exact(limit: int = DEFAULT_EXACT_LIMIT) -> "SteinerSubroutine":
        return SteinerSubroutine(EXACT_MODE, limit)


def scale_to_lattice(points: Sequence[Point]) -> tuple[list[tuple[int, int]], int]:
    """Integer coordinates on the lattice spanned by the points.

    Multiplying every coordinate by the lcm of the denominators keeps all
    arithmetic exact while replacing Fraction operations by int ones; the
    scale factor converts results back.  Lexicographic order is preserved.
    """
    dens = {c.denominator for p in points for c in (p.x, p.y)}
    if dens == {1}:
        return [(p.x.numerator, p.y.numerator) for p in points], 1
    scale = math.lcm(*dens)
    coords = [
        (p.x.numerator * (scale // p.x.denominator), p.y.numerator * (scale // p.y.denominator))
        for p in points
    ]
    return coords, scale


def _all_pairs_candidates(coords: Sequence[tuple[int, int]]) -> list[tuple[int, int, int]]:
    n = len(coords)
    out = []
    append = out.append
    for i in range(n):
        xi, yi = coords[i]
        for j in range(i + 1, n):
            xj, yj = coords[j]
            dx = xi - xj
            if dx < 0:
                dx = -dx
            dy = yi - yj
            if dy < 0:
                dy = -dy
            append((dx + dy, i, j))
    return out


def _octant_candidates(coords: Sequence[tuple[int, int]]) -> list[tuple[int, int, int]]:
    """Candidate edge set containing an L1 MST, via 4 staircase sweeps.

    Each sweep processes points by increasing x+y and keeps, keyed by -y,
    the processed points that may still acquire a nearest neighbor in the
    current octant; a point is emitted and dropped the first time a later
    point falls inside its octant.  The other octants are covered by
    swapping and negating coordinates between sweeps.
    """
    n = len(coords)
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    edges: set[tuple[int, int, int]] = set()
    for sweep_round in range(4):
        order = sorted(range(n), key=lambda i: xs[i] + ys[i])
        active: SortedDict = SortedDict()
        for i in order:
            xi, yi = xs[i], ys[i]
            stale = []
            for key in active.irange(-yi):
                j = active[key]
                dx = xi - xs[j]
                dy = yi - ys[j]
                if dy > dx:
                    break
                a, b = (i, j) if i < j else (j, i)
                edges.add((dx + dy, a, b))
                stale.append(key)
            for key in stale:
                del active[key]
            active[-yi] = i
        if sweep_round % 2 == 0:
            xs, ys = ys, xs
        else:
            xs = [-x for x in xs]
    return sorted(edges)


def lattice_mst_edges(coords: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """MST edge list (index pairs) over distinct integer lattice points.

    Kruskal over candidates ordered by (length, endpoint indices); callers
    that need full determinism should pass coords in sorted order.
    """
    if len(coords) <= 1:
        return []
    if len(coords) <= ALL_PAIRS_LIMIT:
        candidates = sorted(_all_pairs_candidates(coords))
    else:
        candidates = _octant_candidates(coords)
    uf = _UnionFind(len(coords))
    edges = []
    need = len(coords) - 1
    for _, i, j in candidates:
        if uf.union(i, j):
            edges.append((i, j))
            if len(edges) == need:
                break
    if len(edges) != need:
        raise AssertionError("candidate edge set failed to span the points")
    return edges


def _distinct_lattice(
    points: Sequence[Point],
) -> tuple[list[Point], list[tuple[int, int]], int]:
    """Deduplicate and lexicographically sort points via their lattice
    coordinates (cheap int hashing/sorting instead of Fraction work)."""
    coords, scale = scale_to_lattice(points)
    first: dict[tuple[int, int], Point] = {}
    for p, c in zip(points, coords):
        if c not in first:
            first[c] = p
    distinct = sorted(first)
    return [first[c] for c in distinct], distinct, scale


def rectilinear_mst(points: Iterable[Point]) -> EmbeddedTree:
    """Minimum spanning tree of the points under L1 distance.

    Duplicates are dropped.  Deterministic: vertices are sorted
    lexicographically, candidate edges by (length, endpoints), and each
    diagonal edge is embedded as the horizontal-then-vertical L from its
    lexicographically smaller end.
    """
    pts = list(points)
    if not pts:
        raise ValueError("empty point set")
    pts, coords, _ = _distinct_lattice(pts)
    if len(pts) == 1:
        return EmbeddedTree.single_vertex(pts[0])
    edges = tuple(
        make_edge(i, j, pts[i], pts[j], BEND_HV)
        for i, j in lattice_mst_edges(coords)
    )
    return EmbeddedTree(tuple(pts), edges, tuple(pts))


def approx_steiner(points: Iterable[Point], sub: SteinerSubroutine) -> EmbeddedTree:
    """Steiner tree for the points with the subroutine's guarantee."""
    pts = list(points)
    if not pts:
        raise ValueError("empty point set")
    if sub.mode == EXACT_MODE:
        from . import oracle

        return oracle.exact_rsmt(pts, limit=sub.exact_limit)
    return rectilinear_mst(pts)


# -- overlap-merging post-pass ------------------------------------------------


def _atomize(segments: list[tuple[Point, Point]]) -> dict[tuple[Point, Point], Coord]:
    """Cut segments at all endpoints/crossings and deduplicate overlaps.

    Returns atomic subsegments keyed by sorted endpoint pair.  The union of
    the atoms equals the union of the input segments as a point set, so the
    summed atom length never exceeds the summed input length.
    """
    horizontals = []
    verticals = []
    for a, b in segments:
        if a == b:
            continue
        if a.y == b.y:
            (lo, hi) = (a, b) if a.x < b.x else (b, a)
            horizontals.append((lo, hi))
        else:
            (lo, hi) = (a, b) if a.y < b.y else (b, a)
            verticals.append((lo, hi))

    def cuts_for(seg: tuple[Point, Point], horizontal: bool) -> list[Coord]:
        a, b = seg
        positions = {a.x, b.x} if horizontal else {a.y, b.y}
        for c, d in horizontals:
            if horizontal:
                if c.y == a.y:
                    for p in (c, d):
                        if a.x < p.x < b.x:
                            positions.add(p.x)
            else:
                if c.x <= a.x <= d.x and a.y < c.y < b.y:
                    positions.add(c.y)
        for c, d in verticals:
            if horizontal:
                if c.y <= a.y <= d.y and a.x < c.x < b.x:
                    positions.add(c.x)
            else:
                if c.x == a.x:
                    for p in (c, d):
                        if a.y < p.y < b.y:
                            positions.add(p.y)
        return sorted(positions)

    atoms: dict[tuple[Point, Point], Coord] = {}
    for seg in horizontals:
        a, _ = seg
        cs = cuts_for(seg, True)
        for lo, hi in zip(cs, cs[1:]):
            atoms[(Point(lo, a.y), Point(hi, a.y))] = hi - lo
    for seg in verticals:
        a, _ = seg
        cs = cuts_for(seg, False)
        for lo, hi in zip(cs, cs[1:]):
            atoms[(Point(a.x, lo), Point(a.x, hi))] = hi - lo
    return atoms


def steinerize(t: EmbeddedTree) -> EmbeddedTree:
    """Merge overlapping collinear wire, introducing Steiner vertices.

    The embedded segments are cut into atoms at every endpoint, crossing,
    and overlap boundary; duplicated atoms collapse into one.  A minimum
    spanning tree over the atom graph is kept (dropping the longest atom on
    any cycle) and non-terminal leaf branches are pruned.  The result spans
    the same terminals with total length <= the input length; on a tree
    with no overlapping or crossing wire it is length-preserving.
    """
    if len(t.vertices) <= 1 or not t.edges:
        return t
    atoms = _atomize(t.segments())
    index: dict[Point, int] = {}
    verts: list[Point] = []

    def vid(p: Point) -> int:
        i = index.get(p)
        if i is None:
            i = len(verts)
            index[p] = i
            verts.append(p)
        return i

    weighted = sorted((w, vid(a), vid(b)) for (a, b), w in atoms.items())
    uf = _UnionFind(len(verts))
    adj: dict[int, set[int]] = {i: set() for i in range(len(verts))}
    kept: set[tuple[int, int]] = set()
    for _, i, j in weighted:
        if uf.union(i, j):
            kept.add((i, j))
            adj[i].add(j)
            adj[j].add(i)

    terminal_ids = {index[p] for p in t.terminals if p in index}
    # Terminals are always atom endpoints: they are vertices of the input
    # tree, hence endpoints of its segments.
    assert len(terminal_ids) == len(set(t.terminals))
    # Prune non-terminal leaves.
    leaves = [i for i, nb in adj.items() if len(nb) <= 1 and i not in terminal_ids]
    while leaves:
        i = leaves.pop()
        if adj[i]:
            (j,) = adj[i]
            adj[i].clear()
            adj[j].discard(i)
            kept.discard((i, j))
            kept.discard((j, i))
            if len(adj[j]) <= 1 and j not in terminal_ids:
                leaves.append(j)

    alive = sorted(i for i in range(len(verts)) if adj[i] or i in terminal_ids)
    remap = {old: new for new, old in enumerate(alive)}
    new_vertices = tuple(verts[i] for i in alive)
    new_edges = tuple(
        Edge(remap[i], remap[j], STRAIGHT) for i, j in sorted(kept)
    )
    return EmbeddedTree(new_vertices, new_edges, t.terminals)
