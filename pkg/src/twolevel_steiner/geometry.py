"""Exact rational L1 geometry.

Coordinates are `fractions.Fraction` throughout: canonical reduced form,
positive denominator, arbitrary precision.  Nothing in this module (or in
the solvers built on it) ever rounds, so equality assertions on lengths
and coordinates are meaningful.

The central structure is :class:`EmbeddedTree`, a rectilinear Steiner tree
with explicit vertex coordinates and an explicit embedding for every edge:
a diagonal edge is realized as one of its two L-shapes, an axis-aligned
edge as a straight segment.  The embedding matters: nearest-point queries
and the connection-point refinement both depend on where the wire actually
runs, not only on which vertices it joins.

All types are immutable values; every function is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union


Coord = Fraction

CoordLike = Union[int, str, Fraction]

# Edge embeddings: horizontal-then-vertical, vertical-then-horizontal, or a
# single axis-aligned segment.
BEND_HV = "hv"
BEND_VH = "vh"
STRAIGHT = "straight"


def coord(value: CoordLike) -> Coord:
    """Convert an int, Fraction, or numeric string to an exact coordinate.

    Strings may be integers ("3"), decimals ("0.5"), or fractions ("7/13").
    Floats are rejected: binary floats silently misrepresent decimal input,
    and exactness is a hard requirement here.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    raise TypeError(
        f"cannot convert {type(value).__name__} to an exact coordinate; "
        "use int, Fraction, or a decimal/fraction string"
    )


@dataclass(frozen=True, order=True)
class Point:
    """A point in the plane with exact rational coordinates.

    Ordering is lexicographic (x, then y); it is the tie-break order used
    everywhere determinism is needed.
    """

    x: Coord
    y: Coord

    def __repr__(self) -> str:
        return f"({self.x}, {self.y})"


def _point_hash(self: Point) -> int:
    # Hashing numerator/denominator pairs is several times faster than
    # Fraction.__hash__ (which does a modular inverse) and agrees with
    # equality because Fractions are kept canonical.
    return hash((self.x.numerator, self.x.denominator, self.y.numerator, self.y.denominator))


Point.__hash__ = _point_hash  # type: ignore[method-assign]


def pt(x: CoordLike, y: CoordLike) -> Point:
    """Shorthand constructor accepting any coordinate-like values."""
    return Point(coord(x), coord(y))


def l1_dist(p: Point, q: Point) -> Coord:
    """L1 (rectilinear) distance |p.x - q.x| + |p.y - q.y|."""
    return abs(p.x - q.x) + abs(p.y - q.y)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle; degenerate (zero width/height) is allowed."""

    xmin: Coord
    xmax: Coord
    ymin: Coord
    ymax: Coord

    def __post_init__(self) -> None:
        if self.xmin > self.xmax or self.ymin > self.ymax:
            raise ValueError(f"empty rectangle: {self}")

    @property
    def width(self) -> Coord:
        return self.xmax - self.xmin

    @property
    def height(self) -> Coord:
        return self.ymax - self.ymin

    def semiperimeter(self) -> Coord:
        """Width plus height, the rectangle 'length' used in all bounds."""
        return self.width + self.height

    def center(self) -> Point:
        return Point((self.xmin + self.xmax) / 2, (self.ymin + self.ymax) / 2)

    def contains(self, p: Point) -> bool:
        return self.xmin <= p.x <= self.xmax and self.ymin <= p.y <= self.ymax

    def __repr__(self) -> str:
        return f"Rect[{self.xmin},{self.xmax}]x[{self.ymin},{self.ymax}]"


def bounding_box(points: Iterable[Point]) -> Rect:
    """Smallest axis-aligned rectangle containing all points."""
    pts = list(points)
    if not pts:
        raise ValueError("empty point set")
    return Rect(
        min(p.x for p in pts),
        max(p.x for p in pts),
        min(p.y for p in pts),
        max(p.y for p in pts),
    )


@dataclass(frozen=True)
class HananGrid:
    """The grid induced by the distinct x- and y-coordinates of a point set.

    Vertices are implicit: every (xs[i], ys[j]) pair.  Grid edges join
    coordinate-adjacent vertices and are weighted by L1 length.
    """

    xs: tuple[Coord, ...]
    ys: tuple[Coord, ...]

    @property
    def vertex_count(self) -> int:
        return len(self.xs) * len(self.ys)

    def vertices(self) -> list[Point]:
        return [Point(x, y) for x in self.xs for y in self.ys]

    def contains(self, p: Point) -> bool:
        return p.x in self.xs and p.y in self.ys


def hanan_grid(points: Iterable[Point]) -> HananGrid:
    pts = list(points)
    if not pts:
        raise ValueError("empty point set")
    return HananGrid(
        tuple(sorted({p.x for p in pts})),
        tuple(sorted({p.y for p in pts})),
    )


@dataclass(frozen=True)
class Edge:
    """Tree edge between vertex indices u, v with an explicit embedding.

    ``bend == BEND_HV`` runs horizontally from u then vertically to v;
    ``BEND_VH`` the other way round; ``STRAIGHT`` is a single segment and is
    the canonical form whenever the endpoints are axis-aligned.
    """

    u: int
    v: int
    bend: str = STRAIGHT


Segment = tuple[Point, Point]


@dataclass(frozen=True)
class EmbeddedTree:
    """A rectilinear Steiner tree with explicit edge embeddings.

    ``vertices`` holds terminals and Steiner points alike; ``terminals``
    records which points the tree is required to span.  The tree invariants
    (connected, |E| = |V| - 1, every embedding matching its endpoints) are
    established by the constructors and checked by :func:`validate_tree`.
    """

    vertices: tuple[Point, ...]
    edges: tuple[Edge, ...]
    terminals: tuple[Point, ...]

    @staticmethod
    def single_vertex(p: Point, terminals: Sequence[Point] | None = None) -> "EmbeddedTree":
        terms = tuple(terminals) if terminals is not None else (p,)
        return EmbeddedTree((p,), (), terms)

    @staticmethod
    def from_point_edges(
        point_edges: Sequence[tuple[Point, Point, str]],
        terminals: Sequence[Point],
    ) -> "EmbeddedTree":
        """Build a tree from (endpoint, endpoint, bend) triples.

        Vertices are deduplicated and indexed in first-seen order.
        """
        index: dict[Point, int] = {}
        vertices: list[Point] = []

        def vid(p: Point) -> int:
            i = index.get(p)
            if i is None:
                i = len(vertices)
                index[p] = i
                vertices.append(p)
            return i

        edges = []
        for a, b, bend in point_edges:
            edges.append(make_edge(vid(a), vid(b), a, b, bend))
        if not edges:
            for p in terminals:
                vid(p)
        return EmbeddedTree(tuple(vertices), tuple(edges), tuple(terminals))

    def edge_segments(self, e: Edge) -> list[Segment]:
        """The one or two axis-aligned segments realizing edge ``e``."""
        u, v = self.vertices[e.u], self.vertices[e.v]
        if e.bend == STRAIGHT or u.x == v.x or u.y == v.y:
            return [(u, v)]
        if e.bend == BEND_HV:
            corner = Point(v.x, u.y)
        else:
            corner = Point(u.x, v.y)
        return [(u, corner), (corner, v)]

    def segments(self) -> list[Segment]:
        out: list[Segment] = []
        for e in self.edges:
            out.extend(self.edge_segments(e))
        if not self.edges and self.vertices:
            # Degenerate single-vertex tree still occupies its point.
            p = self.vertices[0]
            out.append((p, p))
        return out


def make_edge(u: int, v: int, pu: Point, pv: Point, bend: str = BEND_HV) -> Edge:
    """Create an edge, normalizing axis-aligned endpoints to STRAIGHT."""
    if bend not in (BEND_HV, BEND_VH, STRAIGHT):
        raise ValueError(f"unknown bend {bend!r}")
    if pu.x == pv.x or pu.y == pv.y:
        return Edge(u, v, STRAIGHT)
    if bend == STRAIGHT:
        raise ValueError(f"edge {pu}-{pv} is not axis-aligned; pick an L orientation")
    return Edge(u, v, bend)


def tree_length(t: EmbeddedTree) -> Coord:
    """Total L1 length; independent of the chosen L-shape orientations."""
    verts = t.vertices
    total = Fraction(0)
    for e in t.edges:
        u, v = verts[e.u], verts[e.v]
        total += abs(u.x - v.x) + abs(u.y - v.y)
    return total


def _clamp(value: Coord, lo: Coord, hi: Coord) -> Coord:
    if value < lo:
        return lo
    if value > hi:
        return hi
    return value


def nearest_point_on_segment(seg: Segment, q: Point) -> tuple[Point, Coord]:
    """Closest point of an axis-aligned segment to q, with its L1 distance.

    The minimizer is unique because |t - c| is strictly V-shaped along the
    segment's free axis.
    """
    a, b = seg
    if a.y == b.y:
        lo, hi = (a.x, b.x) if a.x <= b.x else (b.x, a.x)
        p = Point(_clamp(q.x, lo, hi), a.y)
    else:
        lo, hi = (a.y, b.y) if a.y <= b.y else (b.y, a.y)
        p = Point(a.x, _clamp(q.y, lo, hi))
    return p, l1_dist(p, q)


def point_on_segment(p: Point, seg: Segment) -> bool:
    a, b = seg
    if a.y == b.y:
        return p.y == a.y and min(a.x, b.x) <= p.x <= max(a.x, b.x)
    if a.x == b.x:
        return p.x == a.x and min(a.y, b.y) <= p.y <= max(a.y, b.y)
    raise ValueError(f"segment {seg} is not axis-aligned")


def point_on_tree(t: EmbeddedTree, p: Point) -> bool:
    """True if p coincides with a vertex or lies on an embedded segment."""
    if p in t.vertices:
        return True
    return any(point_on_segment(p, seg) for seg in t.segments())


def nearest_point_on_tree(t: EmbeddedTree, q: Point) -> tuple[Point, Coord]:
    """Point of the embedded tree closest to q under L1, with the distance.

    Ties between segments are broken by the lexicographically smallest
    candidate point, making the result deterministic.
    """
    if not t.vertices:
        raise ValueError("empty tree")
    best_p: Point | None = None
    best_d: Coord | None = None
    for seg in t.segments():
        p, d = nearest_point_on_segment(seg, q)
        if best_d is None or d < best_d or (d == best_d and p < best_p):
            best_p, best_d = p, d
    assert best_p is not None and best_d is not None
    return best_p, best_d


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def validate_tree(t: EmbeddedTree, required_terminals: Iterable[Point]) -> list[str]:
    """Structural checks; returns a list of violations (empty = valid).

    Checks tree-ness (|E| = |V| - 1, connected, no duplicate vertices) and
    that every required terminal coincides with a vertex or lies on an
    embedded segment.  Never raises on malformed input.
    """
    violations: list[str] = []
    n = len(t.vertices)
    if n == 0:
        violations.append("no vertices")
        return violations
    if len(set(t.vertices)) != n:
        violations.append("duplicate vertices")
    if len(t.edges) != n - 1:
        violations.append(f"edge count {len(t.edges)} != |V|-1 = {n - 1}")
    uf = _UnionFind(n)
    cycle = False
    for e in t.edges:
        if not (0 <= e.u < n and 0 <= e.v < n):
            violations.append(f"edge index out of range: {e}")
            return violations
        if e.u == e.v:
            violations.append(f"self-loop at vertex {e.u}")
        elif not uf.union(e.u, e.v):
            cycle = True
    if cycle:
        violations.append("contains a cycle")
    roots = {uf.find(i) for i in range(n)}
    if len(roots) > 1:
        violations.append("not connected")
    segs = t.segments()
    for p in required_terminals:
        if p in t.vertices:
            continue
        if not any(point_on_segment(p, s) for s in segs):
            violations.append(f"terminal uncovered: {p}")
    return violations


def insert_vertex(t: EmbeddedTree, p: Point) -> tuple[EmbeddedTree, int]:
    """Return a tree equal to ``t`` in which ``p`` is an explicit vertex.

    If p already is a vertex this is a no-op; if p lies on an embedded
    segment, the edge carrying it is split at p (preserving the embedding
    and the total length).  Raises ValueError if p is not on the tree.
    """
    for i, v in enumerate(t.vertices):
        if v == p:
            return t, i
    for ei, e in enumerate(t.edges):
        segs = t.edge_segments(e)
        for si, seg in enumerate(segs):
            if not point_on_segment(p, seg):
                continue
            u, v = t.vertices[e.u], t.vertices[e.v]
            new_idx = len(t.vertices)
            vertices = t.vertices + (p,)
            if len(segs) == 1:
                replacement = [Edge(e.u, new_idx, STRAIGHT), Edge(new_idx, e.v, STRAIGHT)]
            elif si == 0:
                # p on the first leg; the remainder keeps the original bend.
                corner_bend = e.bend
                replacement = [
                    Edge(e.u, new_idx, STRAIGHT),
                    make_edge(new_idx, e.v, p, v, corner_bend),
                ]
            else:
                replacement = [
                    make_edge(e.u, new_idx, u, p, e.bend),
                    Edge(new_idx, e.v, STRAIGHT),
                ]
            edges = t.edges[:ei] + tuple(replacement) + t.edges[ei + 1 :]
            return EmbeddedTree(vertices, edges, t.terminals), new_idx
    raise ValueError(f"point {p} does not lie on the tree")
