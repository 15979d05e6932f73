"""Two-level rectilinear Steiner tree solvers.

An instance is a partition of the terminals into groups P_1..P_k.  A
solution consists of a subtree T_i spanning each group, a top-level tree
joining all subtrees, and a connection point q_i lying on both T_i and the
top-level tree.  The objective is the summed length of all trees.

Every solver here follows the same scheme: predetermine the connection
points, then build the top-level tree over {q_1..q_k} and each subtree
over P_i + {q_i} with a pluggable Steiner subroutine of guarantee alpha.
The strategies differ only in how q_i is chosen:

* ``solve_simple``        q_i is a terminal of P_i (factor 2*alpha);
* ``solve_bbox_center``   q_i is the bounding-box center (factor 7/4*alpha);
* ``solve_adjusted``      q_i is the center shifted along the diagonal by a
  threshold derived from where the terminals actually sit, and the subtree
  is additionally refined against a tree on P_i alone.  This achieves the
  factor f(alpha, beta) computed by :func:`factor_f`; ``optimize_beta``
  picks the best beta (7/13 for alpha = 3/2, value 123/52 < 2.37).
* ``solve_small_top``     q_i comes from the smallest rectangle meeting all
  groups, which is strong whenever that rectangle is small.

All arithmetic is exact rational.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import (
    BEND_HV,
    BEND_VH,
    Coord,
    Edge,
    EmbeddedTree,
    Point,
    Rect,
    STRAIGHT,
    bounding_box,
    insert_vertex,
    l1_dist,
    make_edge,
    nearest_point_on_segment,
    nearest_point_on_tree,
    point_on_tree,
    tree_length,
    validate_tree,
    _UnionFind,
)
from .rsmt import (
    ALL_PAIRS_LIMIT,
    RMST_MODE,
    SteinerSubroutine,
    approx_steiner,
    scale_to_lattice,
    _all_pairs_candidates,
    _octant_candidates,
)


@dataclass(frozen=True)
class Instance:
    """A partitioned terminal set: k non-empty groups of points.

    Points are deduplicated within each group (keeping first occurrence);
    the same point may appear in several groups.
    """

    groups: tuple[tuple[Point, ...], ...]

    @staticmethod
    def from_groups(groups: Iterable[Iterable[Point]]) -> "Instance":
        cleaned = []
        for gi, group in enumerate(groups):
            seen = set()
            pts = []
            for p in group:
                key = (p.x.numerator, p.x.denominator, p.y.numerator, p.y.denominator)
                if key not in seen:
                    seen.add(key)
                    pts.append(p)
            if not pts:
                raise ValueError(f"group {gi} is empty")
            cleaned.append(tuple(pts))
        if not cleaned:
            raise ValueError("no groups")
        return Instance(tuple(cleaned))

    @property
    def k(self) -> int:
        return len(self.groups)

    def all_terminals(self) -> list[Point]:
        return [p for g in self.groups for p in g]

    def terminal_count(self) -> int:
        return sum(len(g) for g in self.groups)


@dataclass(frozen=True)
class TwoLevelTree:
    """A feasible two-level solution: top-level tree, subtrees, q's."""

    top: EmbeddedTree
    subtrees: tuple[EmbeddedTree, ...]
    connection_points: tuple[Point, ...]

    def total_length(self) -> Coord:
        """Top length plus all subtree lengths, recomputed from embeddings."""
        return tree_length(self.top) + sum(
            (tree_length(t) for t in self.subtrees), Fraction(0)
        )

    def validate(self, instance: Instance) -> list[str]:
        """All feasibility violations (empty list when feasible)."""
        violations = []
        if len(self.subtrees) != instance.k or len(self.connection_points) != instance.k:
            violations.append("subtree/connection-point arity mismatch")
            return violations
        violations += [f"top: {v}" for v in validate_tree(self.top, self.connection_points)]
        for i, (t, q, group) in enumerate(
            zip(self.subtrees, self.connection_points, instance.groups)
        ):
            violations += [f"subtree {i}: {v}" for v in validate_tree(t, list(group) + [q])]
            if not point_on_tree(self.top, q):
                violations.append(f"connection point {i} not on top-level tree")
            if not point_on_tree(t, q):
                violations.append(f"connection point {i} not on subtree {i}")
        return violations


# -- connection-point machinery ----------------------------------------------


def bbox_center_point(group: Sequence[Point]) -> Point:
    return bounding_box(group).center()


def is_complete(group: Sequence[Point]) -> bool:
    """True if every closed quadrant of the centered frame holds a terminal.

    Points on the axes witness every quadrant they touch, so a group is
    sent to the shifted-connection-point branch only when some quadrant has
    no witness at all, even on its boundary.
    """
    c = bbox_center_point(group)
    for sx in (-1, 1):
        for sy in (-1, 1):
            if not any(sx * (p.x - c.x) >= 0 and sy * (p.y - c.y) >= 0 for p in group):
                return False
    return True


# The 8 axis-preserving isometries as (a, b, c, d): (x, y) -> (ax+by, cx+dy).
# Enumeration order is part of the canonicalization contract.
_FRAMES: tuple[tuple[int, int, int, int], ...] = (
    (1, 0, 0, 1),  # identity
    (0, -1, 1, 0),  # rotate 90 ccw
    (-1, 0, 0, -1),  # rotate 180
    (0, 1, -1, 0),  # rotate 270 ccw
    (-1, 0, 0, 1),  # mirror x -> -x
    (1, 0, 0, -1),  # mirror y -> -y
    (0, 1, 1, 0),  # swap axes (mirror across y = x)
    (0, -1, -1, 0),  # anti-swap (mirror across y = -x)
)


@dataclass(frozen=True)
class CanonicalFrame:
    """Bounding-box-center translation composed with one of 8 isometries.

    ``apply`` maps original coordinates to the canonical frame; ``invert``
    maps back.  apply . invert and invert . apply are the identity.
    """

    center: Point
    matrix: tuple[int, int, int, int]

    def apply(self, p: Point) -> Point:
        a, b, c, d = self.matrix
        x, y = p.x - self.center.x, p.y - self.center.y
        return Point(a * x + b * y, c * x + d * y)

    def invert(self, p: Point) -> Point:
        # The matrices are orthogonal with entries in {-1,0,1}: the inverse
        # is the transpose.
        a, b, c, d = self.matrix
        return Point(
            a * p.x + c * p.y + self.center.x,
            b * p.x + d * p.y + self.center.y,
        )


def canonicalize(group: Sequence[Point]) -> tuple[CanonicalFrame, list[Point]]:
    """Frame under which the open lower-left quadrant is terminal-free and
    the bounding box is at least as wide as it is tall.

    Only defined for incomplete groups (an empty closed quadrant always
    exists, and the 8 isometries act transitively on quadrant/aspect
    choices, so a qualifying frame exists).  The first qualifying frame in
    the fixed enumeration wins.
    """
    if is_complete(group):
        raise ValueError("canonicalize is only defined for incomplete groups")
    center = bbox_center_point(group)
    for matrix in _FRAMES:
        frame = CanonicalFrame(center, matrix)
        transformed = [frame.apply(p) for p in group]
        if any(p.x < 0 and p.y < 0 for p in transformed):
            continue
        box = bounding_box(transformed)
        if box.width < box.height:
            continue
        return frame, transformed
    raise AssertionError("no qualifying frame for incomplete group")


@dataclass(frozen=True)
class Thresholds:
    """Diagonal offsets bounding how far the connection point may shift."""

    t1: Coord
    t2: Coord
    tmax: Coord
    t: Coord
    beta: Fraction


def thresholds(canonical_group: Sequence[Point], beta: Fraction) -> Thresholds:
    """Offsets for a group already in canonical coordinates.

    t1 is the largest s in [0, tmax] whose open quarter-plane
    {x < s, y < s} is terminal-free; t2 the smallest s in [0, tmax] whose
    open quarter-plane {x > s, y > s} is terminal-free; tmax is half the
    box height (the smaller dimension).  The shift is their minimum capped
    by beta * tmax.
    """
    beta = Fraction(beta)
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    box = bounding_box(canonical_group)
    tmax = box.height / 2
    # No point of a canonical group lies strictly lower-left of the origin,
    # so m1 >= 0; and min(p.x, p.y) <= p.y <= tmax keeps t2 in range.
    m1 = min(max(p.x, p.y) for p in canonical_group)
    m2 = max(min(p.x, p.y) for p in canonical_group)
    t1 = min(tmax, m1)
    t2 = max(Fraction(0), m2)
    t = min(t1, t2, beta * tmax)
    return Thresholds(t1, t2, tmax, t, beta)


def adjusted_connection_point(group: Sequence[Point], beta: Fraction) -> Point:
    """Bounding-box center, shifted diagonally for incomplete groups.

    Complete groups keep the plain center.  Incomplete groups are
    canonicalized, the threshold shift t is computed there, and the point
    center + (t, t) is mapped back through the inverse frame.  The result
    always lies inside the bounding box on the canonical diagonal.

    Equivalent to composing :func:`canonicalize` and :func:`thresholds`;
    implemented on the doubled integer lattice so per-group cost stays flat
    in large batch runs.
    """
    beta = Fraction(beta)
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    if not group:
        raise ValueError("empty group")
    coords, scale = scale_to_lattice(group)
    # Doubled units make the bounding-box center integral.
    coords2 = [(2 * x, 2 * y) for x, y in coords]
    num_x, num_y, den = _adjusted_lattice(coords2, beta)
    return Point(Fraction(num_x, den * 2 * scale), Fraction(num_y, den * 2 * scale))


def _adjusted_lattice(
    coords: Sequence[tuple[int, int]], beta: Fraction
) -> tuple[int, int, int]:
    """Adjusted connection point over integer coordinates with an integral
    bounding-box center; returns (x, y, denominator) in the same units."""
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    cx = (min(xs) + max(xs)) // 2
    cy = (min(ys) + max(ys)) // 2
    centered = [(x - cx, y - cy) for x, y in coords]
    complete = all(
        any(sx * x >= 0 and sy * y >= 0 for x, y in centered)
        for sx in (-1, 1)
        for sy in (-1, 1)
    )
    if complete:
        return cx, cy, 1
    for a, b, c, d in _FRAMES:
        txy = [(a * x + b * y, c * x + d * y) for x, y in centered]
        if any(x < 0 and y < 0 for x, y in txy):
            continue
        # The centered box is symmetric, so width/height are twice the
        # extremes and tmax = height/2 stays integral.
        width = 2 * max(x for x, _ in txy)
        height = 2 * max(y for _, y in txy)
        if width < height:
            continue
        tmax = height // 2
        m1 = min(max(x, y) for x, y in txy)
        m2 = max(min(x, y) for x, y in txy)
        t1 = min(tmax, m1)
        t2 = max(0, m2)
        p, q = beta.numerator, beta.denominator
        t_num = min(t1 * q, t2 * q, p * tmax)  # all over denominator q
        # Inverse frame is the transpose; shift (t, t) maps back through it.
        return cx * q + (a + c) * t_num, cy * q + (b + d) * t_num, q
    raise AssertionError("no qualifying frame for incomplete group")


# -- solvers -------------------------------------------------------------------


def _build_top(points: Sequence[Point], sub: SteinerSubroutine) -> EmbeddedTree:
    # approx_steiner deduplicates; a single distinct point yields the
    # degenerate one-vertex tree.
    return approx_steiner(points, sub)


def solve_with_connection_points(
    instance: Instance, q: Sequence[Point], sub: SteinerSubroutine
) -> TwoLevelTree:
    """Assemble a two-level tree from predetermined connection points."""
    if len(q) != instance.k:
        raise ValueError(f"expected {instance.k} connection points, got {len(q)}")
    top = _build_top(q, sub)
    subtrees = tuple(
        approx_steiner(list(group) + [qi], sub)
        for group, qi in zip(instance.groups, q)
    )
    return TwoLevelTree(top, subtrees, tuple(q))


def solve_simple(instance: Instance, sub: SteinerSubroutine) -> TwoLevelTree:
    """Connection point = the lexicographically smallest terminal of each
    group; guarantee 2 * alpha."""
    q = [min(group) for group in instance.groups]
    return solve_with_connection_points(instance, q, sub)


def solve_bbox_center(instance: Instance, sub: SteinerSubroutine) -> TwoLevelTree:
    """Connection point = bounding-box center; guarantee 7/4 * alpha."""
    q = [bbox_center_point(group) for group in instance.groups]
    return solve_with_connection_points(instance, q, sub)


def _reembed_toward(t: EmbeddedTree, q: Point) -> EmbeddedTree:
    """Re-orient every L-shaped edge so its wire runs as close to q as
    possible.  Orientation changes never change an edge's length."""
    new_edges = []
    changed = False
    for e in t.edges:
        u, v = t.vertices[e.u], t.vertices[e.v]
        if e.bend == STRAIGHT or u.x == v.x or u.y == v.y:
            new_edges.append(e)
            continue
        best_bend = None
        best_key = None
        for bend, corner in ((BEND_HV, Point(v.x, u.y)), (BEND_VH, Point(u.x, v.y))):
            d = min(
                nearest_point_on_segment((u, corner), q)[1],
                nearest_point_on_segment((corner, v), q)[1],
            )
            key = (d, corner)
            if best_key is None or key < best_key:
                best_key = key
                best_bend = bend
        if best_bend != e.bend:
            changed = True
        new_edges.append(Edge(e.u, e.v, best_bend))
    if not changed:
        return t
    return dataclasses.replace(t, edges=tuple(new_edges))


def refine_subtree(
    group: Sequence[Point], q: Point, sub: SteinerSubroutine
) -> EmbeddedTree:
    """Subtree for group + {q}, refined against a tree on the group alone.

    Builds T = sub(group + {q}) and T' = sub(group) with every edge
    re-embedded toward q, attaches q to the nearest point a of T', and
    keeps whichever is shorter (T on ties).  The refinement is what makes
    the adjusted-center strategy beat the plain center bound: when the
    group's own tree already passes near q, paying the detour through q
    twice is wasted length.
    """
    if sub.mode == RMST_MODE:
        return _refine_subtree_lattice(group, q)
    return _refine_subtree_generic(group, q, sub)


def _refine_subtree_generic(
    group: Sequence[Point], q: Point, sub: SteinerSubroutine
) -> EmbeddedTree:
    base = approx_steiner(list(group) + [q], sub)
    alt = approx_steiner(group, sub)
    alt = _reembed_toward(alt, q)
    a, dist = nearest_point_on_tree(alt, q)
    alt_len = tree_length(alt)
    if tree_length(base) <= alt_len + dist:
        return base
    terminals = tuple(dict.fromkeys(list(alt.terminals) + [q]))
    if dist == 0:
        refined, _ = insert_vertex(alt, q)
        return dataclasses.replace(refined, terminals=terminals)
    with_a, ai = insert_vertex(alt, a)
    qi = len(with_a.vertices)
    vertices = with_a.vertices + (q,)
    edges = with_a.edges + (make_edge(ai, qi, a, q, BEND_HV),)
    return EmbeddedTree(vertices, edges, terminals)


def _near_lattice_segment(
    ax: int, ay: int, bx: int, by: int, qx: int, qy: int
) -> tuple[int, int, int]:
    """Closest lattice segment point to q and its distance (integer math)."""
    if ay == by:
        lo, hi = (ax, bx) if ax <= bx else (bx, ax)
        px = lo if qx < lo else (hi if qx > hi else qx)
        py = ay
    else:
        lo, hi = (ay, by) if ay <= by else (by, ay)
        py = lo if qy < lo else (hi if qy > hi else qy)
        px = ax
    return px, py, abs(px - qx) + abs(py - qy)


def _kruskal(
    candidates: Sequence[tuple[int, int, int]], n: int, need: int, skip: int = -1
) -> list[tuple[int, int]]:
    uf = _UnionFind(n)
    union = uf.union
    edges = []
    for _, i, j in candidates:
        if i == skip or j == skip:
            continue
        if union(i, j):
            edges.append((i, j))
            if len(edges) == need:
                break
    return edges


def _refine_subtree_lattice(group: Sequence[Point], q: Point) -> EmbeddedTree:
    """MST-mode refinement entirely in integer lattice arithmetic.

    Semantics match :func:`_refine_subtree_generic` with the rmst
    subroutine: same trees, same tie-breaks, exact results.  The base tree
    (group + q) and the refinement tree (group alone) share one sorted
    candidate edge set: dropping every edge incident to q turns the former
    set into the latter without disturbing the Kruskal order.
    """
    coords_all, scale = scale_to_lattice(list(group) + [q])
    qc = coords_all[-1]
    first: dict[tuple[int, int], Point] = {}
    for p, c in zip(group, coords_all[:-1]):
        if c not in first:
            first[c] = p
    g_coords = sorted(first)
    point_of = dict(first)
    point_of.setdefault(qc, q)

    if qc in first:
        base_coords = g_coords
        q_idx = -1
    else:
        base_coords = sorted(g_coords + [qc])
        q_idx = base_coords.index(qc)
    nb = len(base_coords)
    if nb <= ALL_PAIRS_LIMIT:
        candidates = sorted(_all_pairs_candidates(base_coords))
    else:
        candidates = _octant_candidates(base_coords)
    base_edges = _kruskal(candidates, nb, nb - 1)
    base_len = sum(
        abs(base_coords[i][0] - base_coords[j][0])
        + abs(base_coords[i][1] - base_coords[j][1])
        for i, j in base_edges
    )
    if q_idx < 0:
        alt_edges = base_edges
    else:
        # One fewer vertex to span when q is excluded.
        alt_edges = _kruskal(candidates, nb, nb - 2, skip=q_idx)

    alt_len = 0
    qx, qy = qc
    # Per-edge L orientation toward q, tracking the global nearest point.
    embedded: list[tuple[tuple[int, int], tuple[int, int], str, tuple[int, int]]] = []
    near: tuple[int, tuple[int, int], int] | None = None  # (dist, point, edge idx)
    for idx, (i, j) in enumerate(alt_edges):
        (ux, uy), (vx, vy) = base_coords[i], base_coords[j]
        alt_len += abs(ux - vx) + abs(uy - vy)
        if ux == vx or uy == vy:
            bend = STRAIGHT
            corner = (vx, vy)
            cands = [_near_lattice_segment(ux, uy, vx, vy, qx, qy)]
        else:
            best = None
            for cand_bend, (cx, cy) in ((BEND_HV, (vx, uy)), (BEND_VH, (ux, vy))):
                p1 = _near_lattice_segment(ux, uy, cx, cy, qx, qy)
                p2 = _near_lattice_segment(cx, cy, vx, vy, qx, qy)
                d = min(p1[2], p2[2])
                key = (d, (cx, cy))
                if best is None or key < best[0]:
                    best = (key, cand_bend, (cx, cy), [p1, p2])
            _, bend, corner, cands = best
        embedded.append(((ux, uy), (vx, vy), bend, corner))
        for px, py, d in cands:
            entry = (d, (px, py), idx)
            if near is None or entry < near:
                near = entry

    if not alt_edges:
        # Single-terminal group: the only candidate point is the terminal.
        px, py = g_coords[0]
        near = (abs(px - qx) + abs(py - qy), (px, py), -1)

    dist, (ax, ay), edge_idx = near
    if base_len <= alt_len + dist:
        coord_edges = [
            (base_coords[i], base_coords[j], BEND_HV) for i, j in base_edges
        ]
        return _tree_from_lattice(coord_edges, base_coords, point_of, scale)

    ac = (ax, ay)
    coord_edges = []
    for idx, (u, v, bend, corner) in enumerate(embedded):
        if idx != edge_idx or ac == u or ac == v:
            coord_edges.append((u, v, bend))
            continue
        # Split the carrying edge at a, preserving the embedding.
        if bend == STRAIGHT:
            coord_edges.append((u, ac, STRAIGHT))
            coord_edges.append((ac, v, STRAIGHT))
        elif ac == corner or (bend == BEND_HV and ay == u[1]) or (
            bend == BEND_VH and ax == u[0]
        ):
            # a lies on the first leg (or at the corner itself).
            coord_edges.append((u, ac, STRAIGHT))
            coord_edges.append((ac, v, bend))
        else:
            coord_edges.append((u, ac, bend))
            coord_edges.append((ac, v, STRAIGHT))
    if ac != qc:
        coord_edges.append((ac, qc, BEND_HV))
    coord_terminals = list(g_coords)
    if qc not in first:
        coord_terminals.append(qc)
    return _tree_from_lattice(coord_edges, coord_terminals, point_of, scale)


def _tree_from_lattice(
    coord_edges: list[tuple[tuple[int, int], tuple[int, int], str]],
    coord_terminals: Sequence[tuple[int, int]],
    point_of: dict[tuple[int, int], Point],
    scale: int,
) -> EmbeddedTree:
    """Assemble an EmbeddedTree from lattice-coordinate edges; vertex
    bookkeeping stays on cheap int keys."""
    index: dict[tuple[int, int], int] = {}
    vertices: list[Point] = []

    def vid(c: tuple[int, int]) -> int:
        i = index.get(c)
        if i is None:
            p = point_of.get(c)
            if p is None:
                p = Point(Fraction(c[0], scale), Fraction(c[1], scale))
                point_of[c] = p
            i = len(vertices)
            index[c] = i
            vertices.append(p)
        return i

    edges = []
    for cu, cv, bend in coord_edges:
        iu, iv = vid(cu), vid(cv)
        if cu[0] == cv[0] or cu[1] == cv[1]:
            bend = STRAIGHT
        edges.append(Edge(iu, iv, bend))
    terminals = tuple(vertices[vid(c)] for c in coord_terminals)
    return EmbeddedTree(tuple(vertices), tuple(edges), terminals)


def solve_adjusted(
    instance: Instance, beta: Fraction, sub: SteinerSubroutine
) -> TwoLevelTree:
    """Adjusted-center strategy with subtree refinement; guarantee
    f(alpha, beta) from :func:`factor_f`."""
    beta = Fraction(beta)
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1]")
    q = [adjusted_connection_point(group, beta) for group in instance.groups]
    top = _build_top(q, sub)
    subtrees = tuple(
        refine_subtree(group, qi, sub) for group, qi in zip(instance.groups, q)
    )
    return TwoLevelTree(top, subtrees, tuple(q))


# -- smallest rectangle meeting every group ------------------------------------


def top_level_bbox(instance: Instance) -> tuple[Rect, list[Point]]:
    """Smallest-semiperimeter rectangle containing a terminal of each group,
    with one witness terminal per group.

    Candidate x-ranges are pairs of terminal x-coordinates; for each range a
    sliding window over the y-sorted terminals finds the minimal covering
    y-interval, giving O(n^3) overall.  Ties are broken by area, then by the
    lexicographically smallest (xmin, ymin, xmax, ymax).
    """
    labeled = [
        (p, gi) for gi, group in enumerate(instance.groups) for p in group
    ]
    k = instance.k
    xs = sorted({p.x for p, _ in labeled})
    by_y = sorted(labeled, key=lambda pg: (pg[0].y, pg[0].x, pg[1]))
    best: tuple | None = None
    for i, xmin in enumerate(xs):
        for xmax in xs[i:]:
            window = [(p, g) for (p, g) in by_y if xmin <= p.x <= xmax]
            counts = [0] * k
            covered = 0
            lo = 0
            for hi, (phi, ghi) in enumerate(window):
                counts[ghi] += 1
                if counts[ghi] == 1:
                    covered += 1
                while covered == k:
                    plo, glo = window[lo]
                    cand = (
                        (xmax - xmin) + (phi.y - plo.y),
                        (xmax - xmin) * (phi.y - plo.y),
                        xmin,
                        plo.y,
                        xmax,
                        phi.y,
                    )
                    if best is None or cand < best:
                        best = cand
                    counts[glo] -= 1
                    if counts[glo] == 0:
                        covered -= 1
                    lo += 1
    assert best is not None  # every group is non-empty, so a cover exists
    _, _, xmin, ymin, xmax, ymax = best
    rect = Rect(xmin, xmax, ymin, ymax)
    witnesses = []
    for group in instance.groups:
        inside = [p for p in group if rect.contains(p)]
        witnesses.append(min(inside))
    return rect, witnesses


@dataclass(frozen=True)
class SmallTopCertificate:
    """Terms of the bound total <= U(k) * l(B_top) + alpha * (optimal
    subtree total): everything computable without knowing the optimum."""

    k: int
    u_value: Fraction
    btop: Rect
    top_term: Fraction  # U(k) * semiperimeter(B_top)
    alpha: Fraction
    subtree_total: Coord


def solve_small_top(instance: Instance, sub: SteinerSubroutine) -> TwoLevelTree:
    """Connection points from the smallest rectangle meeting every group."""
    _, witnesses = top_level_bbox(instance)
    return solve_with_connection_points(instance, witnesses, sub)


def small_top_certificate(
    instance: Instance, tree: TwoLevelTree, sub: SteinerSubroutine
) -> SmallTopCertificate:
    from .oracle import u_bound

    rect, _ = top_level_bbox(instance)
    k = instance.k
    u = u_bound(k) if k >= 2 else Fraction(0)
    return SmallTopCertificate(
        k=k,
        u_value=u,
        btop=rect,
        top_term=u * rect.semiperimeter(),
        alpha=sub.alpha,
        subtree_total=sum((tree_length(t) for t in tree.subtrees), Fraction(0)),
    )


# -- approximation-factor calculus ---------------------------------------------


@dataclass(frozen=True)
class FactorSpec:
    """The three bound terms of the adjusted-center analysis and their max.

    term_complete covers groups with a complete box, term_shift covers the
    case where the optimum's connection point is lower-left of ours (the
    shift costs up to 3/8*alpha*beta extra), and term_cap covers the case
    where the beta cap was the binding constraint.
    """

    alpha: Fraction
    beta: Fraction
    term_complete: Fraction
    term_shift: Fraction
    term_cap: Fraction

    @property
    def terms(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.term_complete, self.term_shift, self.term_cap)

    @property
    def value(self) -> Fraction:
        return max(self.terms)


def factor_f(alpha: Fraction, beta: Fraction) -> FactorSpec:
    """Exact approximation factor of the adjusted-center strategy."""
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    if not Fraction(1) <= alpha <= Fraction(3, 2):
        raise ValueError("alpha must lie in [1, 3/2]")
    if not Fraction(0) <= beta <= Fraction(1):
        raise ValueError("beta must lie in [0, 1]")
    return FactorSpec(
        alpha=alpha,
        beta=beta,
        term_complete=Fraction(11, 8) * alpha + Fraction(1, 4),
        term_shift=Fraction(11, 8) * alpha + Fraction(3, 8) * alpha * beta,
        term_cap=Fraction(3, 2) * alpha - beta / 4 + Fraction(1, 4),
    )


def optimize_beta(alpha: Fraction) -> tuple[Fraction, Fraction]:
    """Exact minimizer of max(term_shift, term_cap) with term_complete as a
    floor.

    term_shift rises in beta with slope 3*alpha/8 and term_cap falls with
    slope -1/4, so the max is minimized where they cross:
    beta* = (alpha + 2) / (3*alpha + 2), clamped to [0, 1].
    """
    alpha = Fraction(alpha)
    if not Fraction(1) <= alpha <= Fraction(3, 2):
        raise ValueError("alpha must lie in [1, 3/2]")
    beta = (alpha + 2) / (3 * alpha + 2)
    beta = min(Fraction(1), max(Fraction(0), beta))
    return beta, factor_f(alpha, beta).value
