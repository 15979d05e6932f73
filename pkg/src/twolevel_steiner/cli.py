"""Batch front end: instance I/O, generation, solving, rendering, timing.

Instance files are JSON: ``{"groups": [[[x, y], ...], ...]}`` with
coordinates given as integers or as decimal/fraction strings ("0.5",
"7/13"), parsed exactly into rationals.  Plain JSON floats are accepted
and converted via their shortest decimal representation.

Subcommands:

* ``solve``   run one of the strategies (simple, bbox-center, adjusted,
  small-top) with the rmst or exact subroutine, optionally comparing
  against the exact two-level optimum and writing an SVG rendering;
* ``oracle``  exact optimum only;
* ``gen``     reproducible random instances (uniform or clustered);
* ``bench``   wall-time over a doubling instance ladder plus the fitted
  growth exponent of the adjusted/rmst solver.

Exit code is 0 exactly when no error occurred.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .geometry import Coord, Point, tree_length
from .oracle import ExactSizeError, exact_two_level
from .rsmt import SteinerSubroutine
from .twolevel import (
    Instance,
    TwoLevelTree,
    optimize_beta,
    small_top_certificate,
    solve_adjusted,
    solve_bbox_center,
    solve_simple,
    solve_small_top,
    solve_with_connection_points,
)

ALGORITHMS = ("simple", "bbox-center", "adjusted", "small-top")


class InstanceFormatError(ValueError):
    """Malformed instance file; the message carries position context."""


def _parse_coordinate(value, where: str) -> Coord:
    if isinstance(value, bool):
        raise InstanceFormatError(f"{where}: boolean is not a coordinate")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InstanceFormatError(f"{where}: non-finite coordinate {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise InstanceFormatError(
                f"{where}: non-numeric coordinate {value!r}"
            ) from None
    raise InstanceFormatError(f"{where}: non-numeric coordinate {value!r}")


def parse_instance(data: bytes | str) -> Instance:
    """Parse an instance document, deduplicating repeated points per group
    (with a warning).  Errors carry line/position context."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict) or "groups" not in doc:
        raise InstanceFormatError('top level must be an object with a "groups" key')
    raw_groups = doc["groups"]
    if not isinstance(raw_groups, list) or not raw_groups:
        raise InstanceFormatError("no groups")
    groups = []
    for gi, raw_group in enumerate(raw_groups):
        if not isinstance(raw_group, list) or not raw_group:
            raise InstanceFormatError(f"groups[{gi}]: empty group")
        pts = []
        seen = set()
        for pi, raw_point in enumerate(raw_group):
            where = f"groups[{gi}][{pi}]"
            if not isinstance(raw_point, (list, tuple)) or len(raw_point) != 2:
                raise InstanceFormatError(f"{where}: expected a [x, y] pair")
            p = Point(
                _parse_coordinate(raw_point[0], where),
                _parse_coordinate(raw_point[1], where),
            )
            if p in seen:
                warnings.warn(
                    f"{where}: duplicate point {p} dropped", stacklevel=2
                )
                continue
            seen.add(p)
            pts.append(p)
        groups.append(pts)
    return Instance.from_groups(groups)


def _coordinate_json(c: Coord):
    return int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def dump_instance(instance: Instance) -> str:
    """Canonical JSON for an instance; parse(dump(x)) == x."""
    doc = {
        "groups": [
            [[_coordinate_json(p.x), _coordinate_json(p.y)] for p in group]
            for group in instance.groups
        ]
    }
    return json.dumps(doc)


def generate_instance(
    seed: int,
    k: int,
    points_per_group: int,
    distribution: str = "uniform",
    extent: int = 1000,
) -> Instance:
    """Deterministic random instance: k groups of the given size with
    integer coordinates in [0, extent].  ``clustered`` confines each group
    to a random window a quarter of the extent wide."""
    if k < 1 or points_per_group < 1:
        raise ValueError("k and points_per_group must be positive")
    if distribution not in ("uniform", "clustered"):
        raise ValueError(f"unknown distribution {distribution!r}")
    rng = random.Random(seed)
    window = max(1, extent // 4)
    groups = []
    for _ in range(k):
        if distribution == "clustered":
            ox = rng.randint(0, max(0, extent - window))
            oy = rng.randint(0, max(0, extent - window))
            span = window
        else:
            ox = oy = 0
            span = extent
        pts: list[Point] = []
        seen = set()
        while len(pts) < points_per_group:
            p = Point(
                Fraction(ox + rng.randint(0, span)),
                Fraction(oy + rng.randint(0, span)),
            )
            if p not in seen:
                seen.add(p)
                pts.append(p)
        groups.append(pts)
    return Instance.from_groups(groups)


# -- reports ---------------------------------------------------------------------


def fmt_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def fmt_decimal(value: Fraction) -> str:
    return f"{float(value):.6g}"


def _length_json(value: Fraction) -> dict:
    return {"rational": fmt_rational(value), "decimal": fmt_decimal(value)}


@dataclass
class RunReport:
    """Everything one solver run reports; lengths are recomputed from the
    returned embeddings, never cached."""

    algorithm: str
    parameters: dict
    total_length: Fraction
    top_length: Fraction
    subtree_lengths: list[Fraction]
    connection_points: list[Point]
    wall_time_s: float
    oracle_length: Fraction | None = None
    ratio: Fraction | None = None
    svg_path: str | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "algorithm": self.algorithm,
            "parameters": self.parameters,
            "total_length": _length_json(self.total_length),
            "top_length": _length_json(self.top_length),
            "subtree_lengths": [_length_json(v) for v in self.subtree_lengths],
            "connection_points": [
                [fmt_rational(q.x), fmt_rational(q.y)] for q in self.connection_points
            ],
            "wall_time_s": self.wall_time_s,
        }
        if self.oracle_length is not None:
            doc["oracle"] = {
                "length": _length_json(self.oracle_length),
                "ratio": _length_json(self.ratio),
            }
        if self.svg_path is not None:
            doc["svg"] = self.svg_path
        return doc

    def format_text(self) -> str:
        lines = [f"algorithm:      {self.algorithm}"]
        if self.parameters:
            params = ", ".join(f"{k}={v}" for k, v in self.parameters.items())
            lines.append(f"parameters:     {params}")
        lines.append(
            f"total length:   {fmt_rational(self.total_length)}"
            f" ({fmt_decimal(self.total_length)})"
        )
        lines.append(f"top length:     {fmt_rational(self.top_length)}")
        subtree = ", ".join(fmt_rational(v) for v in self.subtree_lengths)
        lines.append(f"subtree lengths: {subtree}")
        qs = "; ".join(f"{fmt_rational(q.x)},{fmt_rational(q.y)}" for q in self.connection_points)
        lines.append(f"connections:    {qs}")
        if self.oracle_length is not None:
            lines.append(
                f"oracle optimum: {fmt_rational(self.oracle_length)}"
                f" (ratio {fmt_rational(self.ratio)} = {fmt_decimal(self.ratio)})"
            )
        lines.append(f"wall time:      {self.wall_time_s:.6f} s")
        if self.svg_path:
            lines.append(f"svg:            {self.svg_path}")
        return "\n".join(lines)


def build_report(
    algorithm: str,
    parameters: dict,
    instance: Instance,
    tree: TwoLevelTree,
    wall_time_s: float,
    with_oracle: bool = False,
) -> RunReport:
    total = tree.total_length()
    report = RunReport(
        algorithm=algorithm,
        parameters=parameters,
        total_length=total,
        top_length=tree_length(tree.top),
        subtree_lengths=[tree_length(t) for t in tree.subtrees],
        connection_points=list(tree.connection_points),
        wall_time_s=wall_time_s,
    )
    if with_oracle:
        _, optimum = exact_two_level(instance)
        report.oracle_length = optimum
        report.ratio = total / optimum if optimum else Fraction(1)
    return report


# -- SVG rendering -----------------------------------------------------------------

_GROUP_COLORS = (
    "#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#ff7f0e", "#aec7e8",
)
_TOP_COLOR = "#d62728"


def render_svg(instance: Instance, tree: TwoLevelTree, size: int = 640) -> str:
    """SVG rendering: one polyline per embedded segment, groups
    color-coded, the top-level tree distinct, connection points marked."""
    pts = instance.all_terminals() + [v for t in tree.subtrees for v in t.vertices]
    pts += list(tree.top.vertices) + list(tree.connection_points)
    xs = [float(p.x) for p in pts]
    ys = [float(p.y) for p in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    pad = 0.05 * span
    x0, y0 = min(xs) - pad, min(ys) - pad
    scale = size / (span + 2 * pad)

    def sx(x: float) -> float:
        return (x - x0) * scale

    def sy(y: float) -> float:
        # SVG y grows downward.
        return size - (y - y0) * scale

    root = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(size),
        height=str(size),
        viewBox=f"0 0 {size} {size}",
    )

    def draw_tree(t, color: str, stroke: float) -> None:
        for a, b in t.segments():
            ET.SubElement(
                root,
                "polyline",
                points=f"{sx(float(a.x)):.2f},{sy(float(a.y)):.2f} "
                f"{sx(float(b.x)):.2f},{sy(float(b.y)):.2f}",
                fill="none",
                stroke=color,
                attrib={"stroke-width": f"{stroke}"},
            )

    for gi, t in enumerate(tree.subtrees):
        draw_tree(t, _GROUP_COLORS[gi % len(_GROUP_COLORS)], 1.5)
    draw_tree(tree.top, _TOP_COLOR, 2.5)
    marker = max(2.0, size / 200)
    for gi, group in enumerate(instance.groups):
        color = _GROUP_COLORS[gi % len(_GROUP_COLORS)]
        for p in group:
            ET.SubElement(
                root,
                "rect",
                x=f"{sx(float(p.x)) - marker:.2f}",
                y=f"{sy(float(p.y)) - marker:.2f}",
                width=f"{2 * marker}",
                height=f"{2 * marker}",
                fill=color,
            )
    for q in tree.connection_points:
        ET.SubElement(
            root,
            "circle",
            cx=f"{sx(float(q.x)):.2f}",
            cy=f"{sy(float(q.y)):.2f}",
            r=f"{marker * 1.2}",
            fill="none",
            stroke=_TOP_COLOR,
            attrib={"stroke-width": "1.5"},
        )
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(
        root, encoding="unicode"
    )


# -- commands ------------------------------------------------------------------------


def _parse_beta(text: str) -> Fraction:
    try:
        beta = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"invalid beta {text!r}; use a rational like 7/13 or 0.5") from None
    if not 0 <= beta <= 1:
        raise ValueError(f"beta must lie in [0, 1], got {text}")
    return beta


def _parse_connect(text: str) -> list[Point]:
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError(f"invalid connection point {chunk!r}; expected x,y")
        points.append(Point(Fraction(parts[0].strip()), Fraction(parts[1].strip())))
    if not points:
        raise ValueError("empty --connect list")
    return points


def _read_instance(path: str) -> Instance:
    if path == "-":
        return parse_instance(sys.stdin.read())
    with open(path, "rb") as handle:
        return parse_instance(handle.read())


def _subroutine(args) -> SteinerSubroutine:
    if args.sub == "exact":
        return SteinerSubroutine.exact(args.exact_limit)
    return SteinerSubroutine.rmst()


def solve_command(args) -> RunReport:
    instance = _read_instance(args.instance)
    sub = _subroutine(args)
    parameters: dict = {"sub": args.sub, "alpha": fmt_rational(sub.alpha)}
    started = time.perf_counter()
    if args.connect is not None:
        forced = _parse_connect(args.connect)
        tree = solve_with_connection_points(instance, forced, sub)
        parameters["connect"] = "; ".join(
            f"{fmt_rational(q.x)},{fmt_rational(q.y)}" for q in forced
        )
        algorithm = f"{args.algo}+forced-connect"
    elif args.algo == "simple":
        tree = solve_simple(instance, sub)
        algorithm = "simple"
    elif args.algo == "bbox-center":
        tree = solve_bbox_center(instance, sub)
        algorithm = "bbox-center"
    elif args.algo == "adjusted":
        beta = _parse_beta(args.beta) if args.beta else optimize_beta(sub.alpha)[0]
        parameters["beta"] = fmt_rational(beta)
        tree = solve_adjusted(instance, beta, sub)
        algorithm = "adjusted"
    elif args.algo == "small-top":
        tree = solve_small_top(instance, sub)
        cert = small_top_certificate(instance, tree, sub)
        parameters["u_bound"] = fmt_rational(cert.u_value)
        parameters["btop_semiperimeter"] = fmt_rational(cert.btop.semiperimeter())
        parameters["top_bound"] = fmt_rational(cert.top_term)
        algorithm = "small-top"
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown algorithm {args.algo!r}")
    elapsed = time.perf_counter() - started
    report = build_report(
        algorithm, parameters, instance, tree, elapsed, with_oracle=args.oracle
    )
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as handle:
            handle.write(render_svg(instance, tree))
        report.svg_path = args.svg
    return report


def oracle_command(args) -> RunReport:
    instance = _read_instance(args.instance)
    started = time.perf_counter()
    tree, _ = exact_two_level(instance)
    elapsed = time.perf_counter() - started
    return build_report("oracle", {}, instance, tree, elapsed)


def gen_command(args) -> str:
    instance = generate_instance(
        args.seed, args.groups, args.points_per_group, args.distribution, args.extent
    )
    return dump_instance(instance)


def _fit_exponent(sizes: Sequence[int], times: Sequence[float]) -> float:
    logs_n = [math.log(n) for n in sizes]
    logs_t = [math.log(max(t, 1e-9)) for t in times]
    mean_n = sum(logs_n) / len(logs_n)
    mean_t = sum(logs_t) / len(logs_t)
    cov = sum((a - mean_n) * (b - mean_t) for a, b in zip(logs_n, logs_t))
    var = sum((a - mean_n) ** 2 for a in logs_n)
    return cov / var


def bench_ladder(min_n: int, max_n: int) -> list[int]:
    sizes = []
    n = min_n
    while n < max_n:
        sizes.append(n)
        n *= 2
    sizes.append(max_n)
    return sizes


def bench_command(args) -> dict:
    if args.sizes:
        sizes = [int(s) for s in args.sizes.split(",")]
    else:
        sizes = bench_ladder(args.min_n, args.max_n)
    sub = _subroutine(args)
    if sub.mode == "exact":
        over = [n for n in sizes if n > sub.exact_limit]
        if over:
            raise ExactSizeError(
                f"exact mode refuses n = {over[0]} (> limit {sub.exact_limit});"
                " use --sub rmst for large instances"
            )
    beta = _parse_beta(args.beta) if args.beta else optimize_beta(sub.alpha)[0]
    rows = []
    for n in sizes:
        k = max(1, n // args.group_size)
        per_group = max(1, n // k)
        instance = generate_instance(
            args.seed + n, k, per_group, "uniform", extent=args.extent
        )
        reps = 2 if n <= 10_000 else 1
        best = math.inf
        length = None
        for _ in range(reps):
            started = time.perf_counter()
            tree = solve_adjusted(instance, beta, sub)
            best = min(best, time.perf_counter() - started)
            length = tree.total_length()
        rows.append(
            {
                "n": instance.terminal_count(),
                "k": instance.k,
                "solve_s": best,
                "length": fmt_rational(length),
            }
        )
    exponent = (
        _fit_exponent([r["n"] for r in rows], [r["solve_s"] for r in rows])
        if len(rows) >= 2
        else float("nan")
    )
    return {"beta": fmt_rational(beta), "rows": rows, "fitted_exponent": exponent}


def _bench_text(result: dict) -> str:
    lines = [f"{'n':>8} {'k':>7} {'solve_s':>10}  length"]
    for row in result["rows"]:
        lines.append(
            f"{row['n']:>8} {row['k']:>7} {row['solve_s']:>10.4f}  {row['length']}"
        )
    lines.append(f"fitted growth exponent: {result['fitted_exponent']:.3f}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twolevel-steiner",
        description="Two-level rectilinear Steiner tree solvers and tools",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="run a solver on an instance file")
    solve.add_argument("instance", help="instance JSON path, or - for stdin")
    solve.add_argument("--algo", choices=ALGORITHMS, default="adjusted")
    solve.add_argument("--sub", choices=("rmst", "exact"), default="rmst")
    solve.add_argument("--beta", help="diagonal shift cap in [0,1], e.g. 7/13")
    solve.add_argument(
        "--connect",
        help='force connection points: "x,y;x,y;..." (one per group)',
    )
    solve.add_argument("--oracle", action="store_true", help="compare to the exact optimum")
    solve.add_argument("--svg", help="write an SVG rendering to this path")
    solve.add_argument("--json", action="store_true", help="machine-readable output")
    solve.add_argument("--exact-limit", type=int, default=9)

    oracle = commands.add_parser("oracle", help="exact two-level optimum")
    oracle.add_argument("instance")
    oracle.add_argument("--json", action="store_true")

    gen = commands.add_parser("gen", help="generate a random instance")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--groups", type=int, default=2)
    gen.add_argument("--points-per-group", type=int, default=3)
    gen.add_argument("--distribution", choices=("uniform", "clustered"), default="uniform")
    gen.add_argument("--extent", type=int, default=1000)
    gen.add_argument("--out", help="write to this path instead of stdout")

    bench = commands.add_parser("bench", help="timing ladder for the adjusted solver")
    bench.add_argument("--sizes", help="comma-separated n values (overrides the ladder)")
    bench.add_argument("--min-n", type=int, default=1000)
    bench.add_argument("--max-n", type=int, default=100_000)
    bench.add_argument("--group-size", type=int, default=10)
    bench.add_argument("--extent", type=int, default=1_000_000)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--sub", choices=("rmst", "exact"), default="rmst")
    bench.add_argument("--beta")
    bench.add_argument("--exact-limit", type=int, default=9)
    bench.add_argument("--json", action="store_true")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            report = solve_command(args)
            if args.json:
                print(json.dumps(report.to_json_dict(), indent=2))
            else:
                print(report.format_text())
        elif args.command == "oracle":
            report = oracle_command(args)
            if args.json:
                print(json.dumps(report.to_json_dict(), indent=2))
            else:
                print(report.format_text())
        elif args.command == "gen":
            text = gen_command(args)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as handle:
                    handle.write(text + "\n")
            else:
                print(text)
        elif args.command == "bench":
            result = bench_command(args)
            if args.json:
                print(json.dumps(result, indent=2))
            else:
                print(_bench_text(result))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
