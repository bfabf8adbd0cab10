"""Building regions for a basic RCC8 network over given bounding rectangles,
and verifying them exactly.

Every primitive is a closed disk intersected with an axis-aligned clip box
that contains the disk centre. Such a piece has bounding box
``bbox(disk) & box``, so MBRs are computed exactly. Pieces with distinct
centres are kept further apart than twice the largest radius, so all
geometric questions reduce to pieces sharing a centre, where they are
decided with rational arithmetic.

Construction, for each eq-class representative ``i`` with rectangle ``r_i``:

* four edge pieces, one disk centred on the relative interior of each edge of
  ``r_i`` and clipped to ``r_i``, pin the MBR;
* an EC pair ``i < j`` gets a point ``Q`` inside ``r_i & r_j``; the left half
  of a small disk at ``Q`` goes to ``i`` and the right half to ``j``;
* a PO pair gets two points: a full disk shared by both, and a split disk
  giving each side a private half;
* a region also takes the pieces of every region that is a proper part of it;
* for every ``k`` that is a non-tangential proper part of ``i``, the region
  of ``i`` also gets a larger disk, radius indexed by the nesting level of
  ``i``, around every centre of ``k``'s pieces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .algebra import Network, path_consistency
from .boxes import Rectangle, ra_relation_of
from .topology import RCC8, RectUnionRegion, rcc8_of_regions

__all__ = [
    "Piece",
    "SymbolicRegion",
    "RealizationParams",
    "RealizationError",
    "VerificationUndecided",
    "compatible",
    "realize_regions",
    "realize_with_params",
    "verify_regions",
    "VerificationReport",
    "region_relation",
    "to_svg",
]

Point = tuple[Fraction, Fraction]
Box = tuple[Fraction, Fraction, Fraction, Fraction]  # x0, x1, y0, y1


class RealizationError(ValueError):
    """The inputs do not meet the preconditions of the construction."""


class VerificationUndecided(RuntimeError):
    """Two pieces are in a configuration the exact predicates do not cover."""


@dataclass(frozen=True, order=True)
class Piece:
    """Closed disk ``(center, radius)`` intersected with the clip ``box``."""

    center: Point
    radius: Fraction
    box: Box
    kind: str = "disk"

    def __post_init__(self) -> None:
        x0, x1, y0, y1 = self.box
        cx, cy = self.center
        if not (x0 <= cx <= x1 and y0 <= cy <= y1):
            raise ValueError("piece centre must lie in its clip box")
        if self.radius <= 0 or not (x0 < x1 and y0 < y1):
            raise ValueError("degenerate piece")

    def bbox(self) -> Box:
        x0, x1, y0, y1 = self.box
        cx, cy = self.center
        r = self.radius
        return (max(x0, cx - r), min(x1, cx + r), max(y0, cy - r), min(y1, cy + r))

    def contains_point(self, p: Point) -> bool:
        x0, x1, y0, y1 = self.box
        dx, dy = p[0] - self.center[0], p[1] - self.center[1]
        return x0 <= p[0] <= x1 and y0 <= p[1] <= y1 and dx * dx + dy * dy <= self.radius**2

    def inner_point(self) -> Point:
        """A point of the interior of the piece."""
        x0, x1, y0, y1 = self.box
        cx, cy = self.center
        step = self.radius / 4
        sx = 1 if cx == x0 else -1 if cx == x1 else 0
        sy = 1 if cy == y0 else -1 if cy == y1 else 0
        return (cx + sx * step, cy + sy * step)

    def boundary_candidates(self) -> Iterable[tuple[Point, tuple[int, int]]]:
        """Points of the piece paired with an axis direction leaving it."""
        cx, cy = self.center
        r = self.radius
        for d in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            for p in ((cx, cy), (cx + d[0] * r, cy + d[1] * r)):
                if self.contains_point(p) and self.leaves(p, d):
                    yield p, d

    def leaves(self, p: Point, d: tuple[int, int]) -> bool:
        """Whether ``p + t*d`` is outside the piece for all small ``t > 0``.

        Assumes ``p`` lies in the piece.
        """
        x0, x1, y0, y1 = self.box
        if (d[0] > 0 and p[0] == x1) or (d[0] < 0 and p[0] == x0):
            return True
        if (d[1] > 0 and p[1] == y1) or (d[1] < 0 and p[1] == y0):
            return True
        dx, dy = p[0] - self.center[0], p[1] - self.center[1]
        if dx * dx + dy * dy == self.radius**2:
            return dx * d[0] + dy * d[1] >= 0
        return False


def _box_meet(a: Box, b: Box) -> Box:
    return (max(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), min(a[3], b[3]))


def _box_inside(a: Box, b: Box, strict: bool) -> bool:
    if strict:
        return b[0] < a[0] and a[1] < b[1] and b[2] < a[2] and a[3] < b[3]
    return b[0] <= a[0] and a[1] <= b[1] and b[2] <= a[2] and a[3] <= b[3]


def _same_center_meet(p: Piece, q: Piece) -> tuple[bool, bool]:
    """(closed pieces intersect, interiors intersect) for concentric pieces."""
    x0, x1, y0, y1 = _box_meet(p.box, q.box)
    return x0 <= x1 and y0 <= y1, x0 < x1 and y0 < y1


@dataclass
class SymbolicRegion:
    """A region as a union of pieces, with its intended MBR."""

    owner: str
    mbr: Rectangle
    primitives: list[Piece]
    tangencies: list[tuple[str, Point]] = field(default_factory=list)
    contains: list[str] = field(default_factory=list)

    def computed_mbr(self) -> Rectangle:
        boxes = [p.bbox() for p in self.primitives]
        return Rectangle.of(
            min(b[0] for b in boxes),
            max(b[1] for b in boxes),
            min(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )

    def by_center(self) -> dict[Point, list[Piece]]:
        out: dict[Point, list[Piece]] = {}
        for p in self.primitives:
            out.setdefault(p.center, []).append(p)
        return out


@dataclass(frozen=True)
class RealizationParams:
    delta1: Fraction
    delta2: Fraction
    delta: Fraction
    radii: tuple[Fraction, ...]
    ntp_levels: dict[str, int]


# -- compatibility ----------------------------------------------------------

_TPP_OK = frozenset(("d*eq", "d*d", "eq*d", "eq*eq"))


def compatible(rects: Sequence[Rectangle], net: Network) -> list[str]:
    """Violations of the rectangle/topology compatibility conditions.

    An empty list means the rectangles are compatible with ``net``.
    """
    if len(rects) != net.n:
        raise ValueError("one rectangle per variable is required")
    out = []
    names = net.names
    for i in range(net.n):
        for j in range(net.n):
            if i == j:
                continue
            bits = net.m[i][j]
            if not bits or bits & (bits - 1):
                raise ValueError(f"constraint ({names[i]}, {names[j]}) is not basic")
            theta = RCC8.basic_names[bits.bit_length() - 1]
            a, b = rects[i], rects[j]
            pair = f"({names[i]}, {names[j]})"
            if theta != "DC" and i < j:
                if not (max(a.x0, b.x0) < min(a.x1, b.x1) and max(a.y0, b.y0) < min(a.y1, b.y1)):
                    out.append(f"{pair} {theta}: interior of the rectangle intersection is empty")
            rel = ra_relation_of(a, b)
            if theta == "TPP" and rel not in _TPP_OK:
                out.append(f"{pair} TPP: rectangle relation {rel} not in d*eq, d*d, eq*d, eq*eq")
            if theta == "NTPP" and rel != "d*d":
                out.append(f"{pair} NTPP: rectangle relation {rel} is not d*d")
            if theta == "EQ" and i < j and a != b:
                out.append(f"{pair} EQ: rectangles differ")
    return out


# -- construction -------------------------------------------------------------


def _theta(net: Network, i: int, j: int) -> str:
    return RCC8.basic_names[net.m[i][j].bit_length() - 1]


def _ntp_levels(net: Network, reps: Sequence[int]) -> dict[int, int]:
    levels: dict[int, int] = {}

    def level(i: int) -> int:
        if i not in levels:
            below = [k for k in reps if k != i and _theta(net, k, i) == "NTPP"]
            levels[i] = 1 + max((level(k) for k in below), default=0)
        return levels[i]

    for i in reps:
        level(i)
    return levels


class _Coords:
    """Hands out fresh rational coordinates strictly inside grid gaps."""

    def __init__(self, values: Iterable[Fraction], budget: int) -> None:
        self.grid = sorted(set(values))
        self.budget = budget + 1
        self.used = 0

    def fresh(self, lo: Fraction, hi: Fraction) -> Fraction:
        for a, b in zip(self.grid, self.grid[1:]):
            if lo <= a and b <= hi:
                self.used += 1
                if self.used >= self.budget:
                    raise RealizationError("coordinate budget exhausted")
                return a + (b - a) * Fraction(self.used, self.budget)
        raise RealizationError(f"no grid gap inside ({lo}, {hi})")


def _cheb(p: Point, q: Point) -> Fraction:
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def realize_regions(net: Network, rects: Sequence[Rectangle]) -> list[SymbolicRegion]:
    """Regions satisfying the basic RCC8 network ``net`` whose MBRs are ``rects``."""
    regions, _ = realize_with_params(net, rects)
    return regions


def realize_with_params(
    net: Network, rects: Sequence[Rectangle]
) -> tuple[list[SymbolicRegion], RealizationParams]:
    if net.calculus is not RCC8:
        raise RealizationError("realization needs an RCC8 network")
    if not net.is_basic():
        raise RealizationError("realization needs a basic network")
    closed = path_consistency(net)
    if closed is None or closed != net:
        raise RealizationError("network is not path-consistent")
    problems = compatible(rects, net)
    if problems:
        raise RealizationError("rectangles are not compatible: " + "; ".join(problems))

    n = net.n
    names = net.names
    rep = list(range(n))
    for i in range(n):
        for j in range(i):
            if _theta(net, j, i) == "EQ" and rep[i] == i:
                rep[i] = rep[j]
    reps = [i for i in range(n) if rep[i] == i]
    levels = _ntp_levels(net, reps)

    pair_kinds = [(i, j, _theta(net, i, j)) for a, i in enumerate(reps) for j in reps[a + 1 :]]
    point_budget = 4 * len(reps) + 2 * len(pair_kinds)
    xs = _Coords((v for r in rects for v in (r.x0, r.x1)), point_budget)
    ys = _Coords((v for r in rects for v in (r.y0, r.y1)), point_budget)

    edge_points: dict[int, list[tuple[Point, str]]] = {}
    for i in reps:
        r = rects[i]
        edge_points[i] = [
            ((xs.fresh(r.x0, r.x1), r.y0), "edge-s"),
            ((xs.fresh(r.x0, r.x1), r.y1), "edge-n"),
            ((r.x0, ys.fresh(r.y0, r.y1)), "edge-w"),
            ((r.x1, ys.fresh(r.y0, r.y1)), "edge-e"),
        ]
    inner_points: dict[tuple[int, int], list[Point]] = {}
    for i, j, theta in pair_kinds:
        count = {"EC": 1, "PO": 2}.get(theta, 0)
        if not count:
            continue
        a, b = rects[i], rects[j]
        lo_x, hi_x = max(a.x0, b.x0), min(a.x1, b.x1)
        lo_y, hi_y = max(a.y0, b.y0), min(a.y1, b.y1)
        inner_points[(i, j)] = [(xs.fresh(lo_x, hi_x), ys.fresh(lo_y, hi_y)) for _ in range(count)]

    points = [p for pts in edge_points.values() for p, _ in pts]
    points += [p for pts in inner_points.values() for p in pts]
    if len(set(points)) != len(points):
        raise RealizationError("construction points collide")
    grid_x, grid_y = xs.grid, ys.grid
    delta1 = min(
        (_cheb(p, q) for a, p in enumerate(points) for q in points[a + 1 :]), default=Fraction(1)
    )
    clearances = [abs(p[0] - v) for p in points for v in grid_x if p[0] != v]
    clearances += [abs(p[1] - v) for p in points for v in grid_y if p[1] != v]
    delta2 = min(clearances, default=Fraction(1))
    delta = min(delta1, delta2) / 2
    radii = tuple(delta / 4 * Fraction(k, n + 1) for k in range(1, n + 1))
    r1 = radii[0]

    def rect_box(r: Rectangle) -> Box:
        return (r.x0, r.x1, r.y0, r.y1)

    own: dict[int, list[Piece]] = {i: [] for i in reps}
    tangencies: dict[int, list[tuple[str, Point]]] = {i: [] for i in reps}
    for i in reps:
        for p, kind in edge_points[i]:
            own[i].append(Piece(p, r1, rect_box(rects[i]), kind))
    for (i, j), pts in inner_points.items():
        meet = _box_meet(rect_box(rects[i]), rect_box(rects[j]))
        split = pts[-1]
        left = (meet[0], split[0], meet[2], meet[3])
        right = (split[0], meet[1], meet[2], meet[3])
        own[i].append(Piece(split, r1, left, "half-left"))
        own[j].append(Piece(split, r1, right, "half-right"))
        if len(pts) == 2:
            shared = Piece(pts[0], r1, meet, "shared")
            own[i].append(shared)
            own[j].append(shared)
        else:
            tangencies[i].append((names[j], split))
            tangencies[j].append((names[i], split))

    regions_by_rep: dict[int, SymbolicRegion] = {}
    for i in reps:
        parts = [k for k in reps if k != i and _theta(net, k, i) in ("TPP", "NTPP")]
        pieces = set(own[i])
        for k in parts:
            pieces.update(own[k])
        radius = radii[levels[i] - 1]
        for k in parts:
            if _theta(net, k, i) == "NTPP":
                for p in own[k]:
                    pieces.add(Piece(p.center, radius, rect_box(rects[i]), "level"))
        regions_by_rep[i] = SymbolicRegion(
            owner=names[i],
            mbr=rects[i],
            primitives=sorted(pieces),
            tangencies=sorted(tangencies[i]),
            contains=sorted(names[k] for k in parts),
        )

    regions = []
    for i in range(n):
        base = regions_by_rep[rep[i]]
        regions.append(
            SymbolicRegion(
                owner=names[i],
                mbr=rects[i],
                primitives=list(base.primitives),
                tangencies=list(base.tangencies),
                contains=list(base.contains),
            )
        )
    params = RealizationParams(
        delta1=delta1,
        delta2=delta2,
        delta=delta,
        radii=radii,
        ntp_levels={names[i]: levels[rep[i]] for i in range(n)},
    )
    return regions, params


# -- verification -------------------------------------------------------------


def _separated(regions: Sequence[SymbolicRegion]) -> bool:
    """Distinct piece centres lie more than twice the largest radius apart."""
    centers = sorted({p.center for r in regions for p in r.primitives})
    rmax = max((p.radius for r in regions for p in r.primitives), default=Fraction(0))
    bound = (2 * rmax) ** 2
    for a, p in enumerate(centers):
        for q in centers[a + 1 :]:
            dx, dy = p[0] - q[0], p[1] - q[1]
            if dx * dx + dy * dy <= bound:
                return False
    return True


def _in_region(point: Point, groups: dict[Point, list[Piece]], center: Point) -> bool:
    return any(q.contains_point(point) for q in groups.get(center, ()))


def _contained(a: SymbolicRegion, b: SymbolicRegion, interior: bool) -> bool:
    """Exact test of ``a`` inside ``b`` (or inside its interior).

    Relies on the centre separation checked by :func:`_separated`.
    """
    gb = b.by_center()
    proven = True
    for p in a.primitives:
        cands = gb.get(p.center, ())
        if interior:
            ok = any(
                p.radius < q.radius and _box_inside(p.box, q.box, strict=True) for q in cands
            )
        else:
            ok = any(p.radius <= q.radius and _box_inside(p.box, q.box, strict=False) for q in cands)
        if not ok:
            proven = False
            break
    if proven:
        return True
    for p in a.primitives:
        if not _in_region(p.inner_point(), gb, p.center):
            return False
    if interior:
        for p in a.primitives:
            for z, d in p.boundary_candidates():
                if not any(q.contains_point(z) and not q.leaves(z, d) for q in gb.get(p.center, ())):
                    return False
    raise VerificationUndecided(f"cannot decide whether {a.owner} lies inside {b.owner}")


def _region_relation(a: SymbolicRegion, b: SymbolicRegion) -> str:
    ga, gb = a.by_center(), b.by_center()
    touch = overlap = False
    for c in ga.keys() & gb.keys():
        for p in ga[c]:
            for q in gb[c]:
                t, o = _same_center_meet(p, q)
                touch |= t
                overlap |= o
    if not overlap:
        return "EC" if touch else "DC"
    ab = _contained(a, b, interior=False)
    ba = _contained(b, a, interior=False)
    if ab and ba:
        return "EQ"
    if ab:
        return "NTPP" if _contained(a, b, interior=True) else "TPP"
    if ba:
        return "NTPPi" if _contained(b, a, interior=True) else "TPPi"
    return "PO"


def region_relation(a: SymbolicRegion | RectUnionRegion, b: SymbolicRegion | RectUnionRegion) -> str:
    """Exact RCC8 relation between two regions."""
    if isinstance(a, RectUnionRegion) and isinstance(b, RectUnionRegion):
        return rcc8_of_regions(a, b)
    if isinstance(a, SymbolicRegion) and isinstance(b, SymbolicRegion):
        if not _separated([a, b]):
            raise VerificationUndecided("piece centres are too close to decide exactly")
        return _region_relation(a, b)
    raise TypeError("both regions must be of the same kind")


@dataclass
class VerificationReport:
    relations: dict[tuple[str, str], str]
    mbr_relations: dict[tuple[str, str], str]
    mismatches: list[str]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def verify_regions(
    regions: Sequence[SymbolicRegion | RectUnionRegion],
    net: Network,
    rects: Optional[Sequence[Rectangle]] = None,
) -> VerificationReport:
    """Compare the regions against ``net`` (and their MBRs against ``rects``)."""
    mismatches = []
    if len(regions) != net.n:
        raise ValueError("one region per variable is required")
    symbolic = all(isinstance(r, SymbolicRegion) for r in regions)
    if symbolic and not _separated(regions):  # type: ignore[arg-type]
        raise VerificationUndecided("piece centres are too close to decide exactly")
    mbrs = []
    for idx, r in enumerate(regions):
        if isinstance(r, SymbolicRegion):
            got = r.computed_mbr()
            if got != r.mbr:
                mismatches.append(f"{r.owner}: computed MBR {got} differs from recorded {r.mbr}")
        else:
            got = r.mbr()
        if rects is not None and got != rects[idx]:
            mismatches.append(f"{net.names[idx]}: MBR {got} differs from target {rects[idx]}")
        mbrs.append(got)
    relations = {}
    mbr_relations = {}
    for i, j in net.pairs():
        a, b = regions[i], regions[j]
        if symbolic:
            rel = _region_relation(a, b)  # type: ignore[arg-type]
        else:
            rel = region_relation(a, b)
        key = (net.names[i], net.names[j])
        relations[key] = rel
        mbr_relations[key] = ra_relation_of(mbrs[i], mbrs[j])
        expected = RCC8.names_of(net.m[i][j])
        if [rel] != expected:
            mismatches.append(f"{key}: regions are {rel}, network says {','.join(expected)}")
    return VerificationReport(relations, mbr_relations, mismatches)


# -- SVG ------------------------------------------------------------------------

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _fmt(v: Fraction) -> str:
    return f"{float(v):.6f}"


def _piece_path(p: Piece, flip) -> str:
    """SVG path data for a full disk, a half disk, or (fallback) the clipped box."""
    x0, x1, y0, y1 = p.bbox()
    cx, cy = p.center
    r = p.radius
    full = (x0, x1, y0, y1) == (cx - r, cx + r, cy - r, cy + r)
    if full:
        return (
            f"M {_fmt(cx - r)} {_fmt(flip(cy))} "
            f"A {_fmt(r)} {_fmt(r)} 0 1 0 {_fmt(cx + r)} {_fmt(flip(cy))} "
            f"A {_fmt(r)} {_fmt(r)} 0 1 0 {_fmt(cx - r)} {_fmt(flip(cy))} Z"
        )
    # clipped by a single line through the centre: a half disk
    if x0 == cx:
        return (
            f"M {_fmt(cx)} {_fmt(flip(cy - r))} A {_fmt(r)} {_fmt(r)} 0 0 0 "
            f"{_fmt(cx)} {_fmt(flip(cy + r))} Z"
        )
    if x1 == cx:
        return (
            f"M {_fmt(cx)} {_fmt(flip(cy + r))} A {_fmt(r)} {_fmt(r)} 0 0 0 "
            f"{_fmt(cx)} {_fmt(flip(cy - r))} Z"
        )
    if y0 == cy:
        return (
            f"M {_fmt(cx + r)} {_fmt(flip(cy))} A {_fmt(r)} {_fmt(r)} 0 0 0 "
            f"{_fmt(cx - r)} {_fmt(flip(cy))} Z"
        )
    if y1 == cy:
        return (
            f"M {_fmt(cx - r)} {_fmt(flip(cy))} A {_fmt(r)} {_fmt(r)} 0 0 0 "
            f"{_fmt(cx + r)} {_fmt(flip(cy))} Z"
        )
    # general clip: draw the clipped bounding box
    return (
        f"M {_fmt(x0)} {_fmt(flip(y0))} L {_fmt(x1)} {_fmt(flip(y0))} "
        f"L {_fmt(x1)} {_fmt(flip(y1))} L {_fmt(x0)} {_fmt(flip(y1))} Z"
    )


def to_svg(
    regions: Sequence[SymbolicRegion],
    rects: Optional[Sequence[Rectangle]] = None,
    scale: int = 100,
) -> str:
    """Deterministic SVG drawing: one group per region, dashed MBR outlines
    and a marker at every tangency point."""
    boxes = [r.mbr for r in regions] + list(rects or [])
    if boxes:
        minx = min(b.x0 for b in boxes)
        maxx = max(b.x1 for b in boxes)
        miny = min(b.y0 for b in boxes)
        maxy = max(b.y1 for b in boxes)
    else:
        minx = miny = Fraction(0)
        maxx = maxy = Fraction(1)
    pad = (max(maxx - minx, maxy - miny)) / 20
    minx, maxx, miny, maxy = minx - pad, maxx + pad, miny - pad, maxy + pad

    def flip(y: Fraction) -> Fraction:
        return maxy + miny - y

    width, height = (maxx - minx), (maxy - miny)
    stroke = _fmt(max(width, height) / 400)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width * scale)}" height="{_fmt(height * scale)}" '
        f'viewBox="{_fmt(minx)} {_fmt(miny)} {_fmt(width)} {_fmt(height)}">',
    ]
    seen_marks = set()
    for idx, region in enumerate(regions):
        colour = _PALETTE[idx % len(_PALETTE)]
        lines.append(f'  <g id="region-{region.owner}" class="region" fill="{colour}" fill-opacity="0.4" stroke="{colour}" stroke-width="{stroke}">')
        mbr = rects[idx] if rects is not None else region.mbr
        lines.append(
            f'    <rect class="mbr" x="{_fmt(mbr.x0)}" y="{_fmt(flip(mbr.y1))}" '
            f'width="{_fmt(mbr.x1 - mbr.x0)}" height="{_fmt(mbr.y1 - mbr.y0)}" '
            f'fill="none" stroke-dasharray="{stroke} {stroke}"/>'
        )
        for p in region.primitives:
            lines.append(f'    <path class="{p.kind}" d="{_piece_path(p, flip)}"/>')
        lines.append("  </g>")
    marker_r = _fmt(max(width, height) / 200)
    for region in regions:
        for other, point in region.tangencies:
            key = (frozenset((region.owner, other)), point)
            if key in seen_marks:
                continue
            seen_marks.add(key)
            lines.append(
                f'  <circle class="tangency" cx="{_fmt(point[0])}" cy="{_fmt(flip(point[1]))}" '
                f'r="{marker_r}" fill="black"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"

