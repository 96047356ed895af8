import random

import pytest

from cliquegeo.errors import DuplicatePoint
from cliquegeo.geometry import (
    COLLINEAR,
    RIGHT,
    Point,
    cross,
    is_supporting,
    local_upper_hull,
    on_segment,
    orientation,
)
from cliquegeo.oracles import (
    bridge_oracle,
    general_position_check,
    hull_oracle,
    triangulation_validator,
)
from conftest import random_chain, random_points


def brute_hull_vertices(pts):
    """Strict hull membership from the definition: v is a hull vertex iff
    some directed edge through v has every other point strictly to its
    right or collinear between the endpoints."""
    verts = set()
    for a in pts:
        for b in pts:
            if a == b:
                continue
            ok = True
            for c in pts:
                if c in (a, b):
                    continue
                o = orientation(a, b, c)
                if o == RIGHT:
                    continue
                if o == COLLINEAR and on_segment(c, a, b):
                    continue
                ok = False
                break
            if ok:
                verts.add(a)
                verts.add(b)
    return verts


def test_hull_oracle_examples():
    square = [Point(0, 0), Point(4, 0), Point(4, 4), Point(0, 4)]
    got = hull_oracle(square + [Point(2, 1)])
    assert set(got) == set(square) and len(got) == 4
    assert list(hull_oracle([Point(3, 1), Point(0, 2)])) == [Point(0, 2), Point(3, 1)]


def test_hull_oracle_is_clockwise_from_lex_min():
    rng = random.Random(3)
    for _ in range(30):
        pts = random_points(rng, rng.randrange(3, 40), span=30)
        hull = list(hull_oracle(pts))
        assert hull[0] == min(pts)
        if len(hull) >= 3:
            area2 = sum(cross(hull[0], hull[i], hull[i + 1]) for i in range(1, len(hull) - 1))
            assert area2 < 0


def test_hull_oracle_matches_brute_force_membership():
    rng = random.Random(5)
    for _ in range(40):
        pts = random_points(rng, rng.randrange(2, 64), span=24)
        assert set(hull_oracle(pts)) == brute_hull_vertices(pts)


def test_hull_oracle_idempotent_and_rejects_duplicates():
    rng = random.Random(9)
    pts = random_points(rng, 25, span=40)
    hull = list(hull_oracle(pts))
    assert list(hull_oracle(hull)) == hull
    with pytest.raises(DuplicatePoint):
        hull_oracle(pts + [pts[0]])


def test_bridge_oracle_singletons_and_support():
    a = local_upper_hull([Point(0, 0)])
    b = local_upper_hull([Point(5, 3)])
    assert bridge_oracle(a, b) == (Point(0, 0), Point(5, 3))

    rng = random.Random(17)
    for _ in range(50):
        left = local_upper_hull(random_chain(rng, rng.randrange(1, 12), 0, 60))
        right = local_upper_hull(random_chain(rng, rng.randrange(1, 12), 70, 130))
        p, q = bridge_oracle(left, right)
        assert p in left.vertices and q in right.vertices
        assert is_supporting(p, q, left) and is_supporting(p, q, right)


def fan_triangulation():
    corners = [Point(0, 0), Point(4, 0), Point(4, 4), Point(0, 4)]
    center = Point(2, 1)
    pts = corners + [center]
    tris = [
        (corners[i], corners[(i + 1) % 4], center) for i in range(4)
    ]
    tris = [t if orientation(*t) == 1 else (t[0], t[2], t[1]) for t in tris]
    return pts, tris


def test_validator_accepts_square_fan():
    pts, tris = fan_triangulation()
    report = triangulation_validator(pts, tris)
    assert report.passed and not report.failures


def test_validator_catches_missing_triangle():
    pts, tris = fan_triangulation()
    report = triangulation_validator(pts, tris[:-1])
    assert not report.passed
    assert any(check in ("area", "count") for check, _ in report.failures)


def test_validator_catches_overlap():
    pts, tris = fan_triangulation()
    report = triangulation_validator(pts, tris + [tris[0]])
    assert not report.passed


def test_general_position_check():
    ok, witness = general_position_check(
        [Point(0, 0), Point(1, 1), Point(2, 2), Point(0, 5)]
    )
    assert not ok and set(witness) == {Point(0, 0), Point(1, 1), Point(2, 2)}
    ok, witness = general_position_check([Point(0, 0), Point(3, 1), Point(1, 4)])
    assert ok and not witness
