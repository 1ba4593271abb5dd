import itertools
import math
import random
from fractions import Fraction

import pytest

from models.errors import UnsolvableInstance
from models.instance import Point, Segment
from utils.geometry import (
    convex_hull,
    convex_hull_ids,
    dist,
    point_in_ring,
    segments_properly_interact,
    shoelace2,
    signed_area2,
)


def pts(*coords):
    return [Point(x, y, i) for i, (x, y) in enumerate(coords)]


def test_signed_area2_sign_follows_orientation():
    a, b, c = pts((0, 0), (4, 0), (0, 3))
    assert signed_area2(a, b, c) == 12
    assert signed_area2(a, c, b) == -12
    assert signed_area2(*pts((0, 0), (2, 2), (5, 5))) == 0


def test_signed_area2_is_exact_for_large_coordinates():
    big = 2 ** 30
    a, b, c = pts((-big, -big), (big, -big + 1), (big - 1, big))
    expected = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
    assert signed_area2(a, b, c) == expected
    assert isinstance(signed_area2(a, b, c), int)


def test_proper_crossing():
    a, b, c, d = pts((0, 0), (2, 2), (0, 2), (2, 0))
    assert segments_properly_interact(Segment(a, b), Segment(c, d))


def test_disjoint_segments():
    a, b, c, d = pts((0, 0), (1, 0), (5, 5), (6, 6))
    assert not segments_properly_interact(Segment(a, b), Segment(c, d))


def test_shared_chain_endpoint_is_not_an_interaction():
    a, b, c = pts((0, 0), (2, 0), (3, 1))
    assert not segments_properly_interact(Segment(a, b), Segment(b, c))


def test_collinear_overlap_interacts():
    a, b, c, d = pts((0, 0), (4, 0), (1, 0), (2, 0))
    assert segments_properly_interact(Segment(a, b), Segment(c, d))


def test_endpoint_touching_interior_interacts():
    a, b, c, d = pts((0, 0), (4, 0), (2, 0), (2, 3))
    assert segments_properly_interact(Segment(a, b), Segment(c, d))


def test_collinear_chain_folding_back_interacts():
    # (0,0)->(4,0) followed by (4,0)->(2,0) shares id 1 but doubles back over the first edge
    a, b, c = pts((0, 0), (4, 0), (2, 0))
    assert segments_properly_interact(Segment(a, b), Segment(b, c))


def test_hull_drops_interior_point():
    points = pts((0, 0), (10, 0), (10, 10), (0, 10), (5, 5))
    assert sorted(convex_hull_ids(points)) == [0, 1, 2, 3]


def test_hull_drops_collinear_boundary_point():
    points = pts((0, 0), (5, 0), (10, 0), (10, 10), (0, 10))
    assert sorted(convex_hull_ids(points)) == [0, 2, 3, 4]


def test_hull_of_triangle_is_ccw():
    points = pts((0, 0), (0, 3), (4, 0))
    hull = convex_hull(points)
    assert len(hull) == 3
    assert hull.doubled_area == 12


def test_hull_rejects_degenerate_input():
    with pytest.raises(UnsolvableInstance):
        convex_hull_ids(pts((0, 0), (1, 1)))
    with pytest.raises(UnsolvableInstance):
        convex_hull_ids(pts((0, 0), (1, 1), (2, 2), (5, 5)))


def test_hull_is_strictly_convex_and_permutation_invariant(random_instance):
    instance = random_instance(40, seed=3)
    ids = convex_hull_ids(instance.points)
    m = len(ids)
    for i in range(m):
        a, b, c = (instance.points[ids[(i + k) % m]] for k in range(3))
        assert signed_area2(a, b, c) > 0
    ring = [(instance.xs[v], instance.ys[v]) for v in ids]
    assert all(point_in_ring(p.x, p.y, ring) >= 0 for p in instance.points)
    shuffled = list(reversed(instance.points))
    assert sorted(convex_hull_ids(shuffled)) == sorted(ids)


def test_dist():
    a, b, c = pts((0, 0), (3, 4), (1, 1))
    assert dist(a, b) == 5.0
    assert dist(a, a) == 0.0
    assert dist(a, c) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_shoelace_of_square():
    xs, ys = [0, 10, 10, 0], [0, 0, 10, 10]
    assert shoelace2(xs, ys, [0, 1, 2, 3]) == 200
    assert shoelace2(xs, ys, [3, 2, 1, 0]) == -200


def test_point_in_ring():
    ring = [(0, 0), (10, 0), (10, 10), (0, 10)]
    assert point_in_ring(5, 5, ring) == 1
    assert point_in_ring(10, 4, ring) == 0
    assert point_in_ring(0, 0, ring) == 0
    assert point_in_ring(11, 5, ring) == -1
    assert point_in_ring(5, 10, ring) == 0


def permutation_parity(perm):
    inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
    return 1 if inversions % 2 == 0 else -1


def test_signed_area2_is_antisymmetric_under_permutation():
    rng = random.Random(21)
    for _ in range(500):
        triple = pts(*[(rng.randint(-50, 50), rng.randint(-50, 50)) for _ in range(3)])
        base = signed_area2(*triple)
        for perm in itertools.permutations(range(3)):
            assert signed_area2(*(triple[k] for k in perm)) == permutation_parity(perm) * base


def common_points(s, t):
    """
    Exact intersection of two closed segments: None, a single point, or "overlap"
    when they share a piece of positive length.
    """
    px, py = Fraction(s.a.x), Fraction(s.a.y)
    rx, ry = s.b.x - s.a.x, s.b.y - s.a.y
    qx, qy = Fraction(t.a.x), Fraction(t.a.y)
    ux, uy = t.b.x - t.a.x, t.b.y - t.a.y
    wx, wy = qx - px, qy - py
    denom = rx * uy - ry * ux
    if denom != 0:
        k = (wx * uy - wy * ux) / denom
        m = (wx * ry - wy * rx) / denom
        if 0 <= k <= 1 and 0 <= m <= 1:
            return px + k * rx, py + k * ry
        return None
    if wx * ry - wy * rx != 0:
        return None
    length = rx * rx + ry * ry
    k0 = (wx * rx + wy * ry) / length
    k1 = k0 + Fraction(ux * rx + uy * ry, length)
    lo, hi = max(Fraction(0), min(k0, k1)), min(Fraction(1), max(k0, k1))
    if lo < hi:
        return "overlap"
    if lo == hi:
        return px + lo * rx, py + lo * ry
    return None


def interaction_oracle(s, t):
    if {s.a.id, s.b.id} == {t.a.id, t.b.id}:
        return True
    found = common_points(s, t)
    if found is None:
        return False
    if found == "overlap":
        return True
    shared = {(p.x, p.y) for p in (s.a, s.b) if p.id in (t.a.id, t.b.id)}
    return found not in shared


def random_segment_pair(rng, limit):
    """Two segments over four distinct points, or a two-edge chain through a shared vertex."""
    coords = set()
    while len(coords) < 4:
        coords.add((rng.randint(0, limit), rng.randint(0, limit)))
    a, b, c, d = pts(*coords)
    if rng.random() < 0.3:
        return Segment(a, b), Segment(b, c)
    return Segment(a, b), Segment(c, d)


def check_against_oracle(pairs, seed, limit):
    rng = random.Random(seed)
    for _ in range(pairs):
        s, t = random_segment_pair(rng, limit)
        expected = interaction_oracle(s, t)
        assert segments_properly_interact(s, t) == expected, (s, t)
        assert segments_properly_interact(t, s) == expected
        assert segments_properly_interact(Segment(s.b, s.a), Segment(t.b, t.a)) == expected


def test_interaction_matches_exact_oracle_on_small_grid():
    # tiny coordinates make collinear and touching cases common
    check_against_oracle(2_000, seed=5, limit=4)


@pytest.mark.slow
def test_interaction_matches_exact_oracle_fuzz():
    check_against_oracle(50_000, seed=6, limit=4)
    check_against_oracle(50_000, seed=7, limit=1_000)
