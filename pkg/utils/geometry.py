"""
Exact predicates on integer points.

Orientation, intersection and containment tests use Python integers only;
floating point appears in ``dist`` and nowhere else.
"""
import math
from typing import Dict, List, Mapping, Optional, Sequence, Union

from models.errors import UnsolvableInstance
from models.instance import Point, Segment
from models.polygon import Polygon

Coords = Union[Sequence[int], Mapping[int, int]]


def signed_area2(a: Point, b: Point, c: Point) -> int:
    """Twice the signed area of abc; positive iff counterclockwise."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def orient_xy(ax: int, ay: int, bx: int, by: int, cx: int, cy: int) -> int:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def dist(a: Point, b: Point) -> float:
    dx = float(a.x - b.x)
    dy = float(a.y - b.y)
    return math.sqrt(dx * dx + dy * dy)


def _between(lo: int, hi: int, v: int) -> bool:
    return (lo <= v <= hi) if lo <= hi else (hi <= v <= lo)


def _on_segment(ax: int, ay: int, bx: int, by: int, px: int, py: int) -> bool:
    # caller guarantees collinearity
    return _between(ax, bx, px) and _between(ay, by, py)


def interact_xy(ax: int, ay: int, a: int, bx: int, by: int, b: int,
                cx: int, cy: int, c: int, dx: int, dy: int, d: int) -> bool:
    """
    Segment ab against segment cd, endpoints tagged with point ids.

    True for proper crossings, an endpoint touching the other segment, and
    collinear overlaps of positive length. A contact at an endpoint carrying
    the same id on both segments is the shared chain vertex and does not count.
    """
    if (a == c and b == d) or (a == d and b == c):
        return True
    d1 = orient_xy(cx, cy, dx, dy, ax, ay)
    d2 = orient_xy(cx, cy, dx, dy, bx, by)
    d3 = orient_xy(ax, ay, bx, by, cx, cy)
    d4 = orient_xy(ax, ay, bx, by, dx, dy)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    if d1 == 0 and d2 == 0:
        if ax != bx:
            s_lo, s_hi = min(ax, bx), max(ax, bx)
            t_lo, t_hi = min(cx, dx), max(cx, dx)
        else:
            s_lo, s_hi = min(ay, by), max(ay, by)
            t_lo, t_hi = min(cy, dy), max(cy, dy)
        overlap = min(s_hi, t_hi) - max(s_lo, t_lo)
        if overlap > 0:
            return True
        if overlap < 0:
            return False
        # single common point: an endpoint of both segments
        return not (a in (c, d) or b in (c, d))
    if d1 == 0 and a != c and a != d and _on_segment(cx, cy, dx, dy, ax, ay):
        return True
    if d2 == 0 and b != c and b != d and _on_segment(cx, cy, dx, dy, bx, by):
        return True
    if d3 == 0 and c != a and c != b and _on_segment(ax, ay, bx, by, cx, cy):
        return True
    if d4 == 0 and d != a and d != b and _on_segment(ax, ay, bx, by, dx, dy):
        return True
    return False


def ids_interact(xs: Coords, ys: Coords, a: int, b: int, c: int, d: int) -> bool:
    return interact_xy(xs[a], ys[a], a, xs[b], ys[b], b, xs[c], ys[c], c, xs[d], ys[d], d)


def segments_properly_interact(s: Segment, t: Segment) -> bool:
    return interact_xy(s.a.x, s.a.y, s.a.id, s.b.x, s.b.y, s.b.id,
                       t.a.x, t.a.y, t.a.id, t.b.x, t.b.y, t.b.id)


def convex_hull_ids(points: Sequence[Point]) -> List[int]:
    """Strict hull (collinear boundary points dropped), counterclockwise, via monotone chain."""
    pts = sorted(points, key=lambda p: (p.x, p.y))
    if len(pts) < 3:
        raise UnsolvableInstance(f"need at least 3 points for a polygon, got {len(pts)}")

    def half(seq: Sequence[Point]) -> List[Point]:
        chain: List[Point] = []
        for p in seq:
            while len(chain) >= 2 and signed_area2(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(list(reversed(pts)))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise UnsolvableInstance("all points are collinear")
    return [p.id for p in hull]


def convex_hull(points: Sequence[Point], xs: Optional[Coords] = None, ys: Optional[Coords] = None) -> Polygon:
    ids = convex_hull_ids(points)
    if xs is None or ys is None:
        xs: Dict[int, int] = {p.id: p.x for p in points}
        ys: Dict[int, int] = {p.id: p.y for p in points}
    return Polygon(xs, ys, ids)


def shoelace2(xs: Coords, ys: Coords, cycle: Sequence[int]) -> int:
    m = len(cycle)
    total = 0
    for i in range(m):
        u, v = cycle[i], cycle[(i + 1) % m]
        total += xs[u] * ys[v] - xs[v] * ys[u]
    return total


def point_in_ring(px: int, py: int, ring: Sequence[Sequence[int]]) -> int:
    """1 strictly inside, 0 on the boundary, -1 outside (exact crossing-number test)."""
    inside = False
    m = len(ring)
    for i in range(m):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % m]
        if orient_xy(x1, y1, x2, y2, px, py) == 0 and _on_segment(x1, y1, x2, y2, px, py):
            return 0
        if (y1 > py) != (y2 > py):
            # sign of (x-intersection - px) without division
            cross = orient_xy(x1, y1, x2, y2, px, py)
            if (cross > 0) == (y2 > y1):
                inside = not inside
    return 1 if inside else -1
