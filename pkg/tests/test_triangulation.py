"""Corridor recursion, local scan triangulation, and the merge protocol."""
from __future__ import annotations

import random
from collections import Counter

import pytest

import cliquegeo.triangulation as tri_mod
from cliquegeo.engine import EngineConfig, run_protocol
from cliquegeo.errors import NotPowerOfTwo, ProtocolError
from cliquegeo.experiments import run_trial
from cliquegeo.generators import generate
from cliquegeo.geometry import LEFT, Point, cross, orientation
from cliquegeo.oracles import (
    general_position_check,
    hull_oracle,
    triangulation_validator,
)
from cliquegeo.triangulation import (
    Corridor,
    ccw,
    local_triangulation,
    mate_key,
    polygon_cycle,
    split_corridor,
    triangulate_corridor,
    triangulation_program,
    wedge_accepts,
)
from conftest import random_points


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


def _flat(batches: list[list[Point]]) -> list[Point]:
    return [p for batch in batches for p in batch]


def _gp_points(rng: random.Random, count: int) -> list[Point]:
    while True:
        pts = random_points(rng, count)
        if general_position_check(pts)[0]:
            return pts


def _tiling_ok(cycle: list[Point], tris) -> bool:
    """Exact tiling check: count, positive ccw areas, area sum, edge use."""
    if len(tris) != len(cycle) - 2:
        return False
    m = len(cycle)
    area2 = sum(
        cycle[i].x * cycle[(i + 1) % m].y - cycle[(i + 1) % m].x * cycle[i].y
        for i in range(m)
    )
    tri2 = 0
    for a, b, c in tris:
        s = cross(a, b, c)
        if s <= 0:
            return False
        tri2 += s
    if tri2 != area2:
        return False
    edges: Counter = Counter()
    for a, b, c in tris:
        for u, v in ((a, b), (b, c), (c, a)):
            edges[(min(u, v), max(u, v))] += 1
    boundary: Counter = Counter(
        (
            min(cycle[i], cycle[(i + 1) % m]),
            max(cycle[i], cycle[(i + 1) % m]),
        )
        for i in range(m)
    )
    if any(edges[e] != (1 if e in boundary else 2) for e in edges):
        return False
    return all(e in edges for e in boundary)


def test_ccw_normalizes_orientation():
    a, b, c = Point(0, 0), Point(1, 0), Point(1, 1)
    assert ccw(a, b, c) == (a, b, c)
    assert ccw(a, c, b) == (a, b, c)
    rng = random.Random(3)
    for _ in range(50):
        pts = random_points(rng, 3)
        if orientation(*pts) != 0:
            assert orientation(*ccw(*pts)) == LEFT


def test_local_triangulation_smallest_cases():
    tri = local_triangulation([Point(0, 0), Point(1, 2), Point(2, 0)])
    assert tri == [(Point(0, 0), Point(2, 0), Point(1, 2))]
    square_center = sorted(
        [Point(0, 0), Point(4, 0), Point(4, 4), Point(0, 4), Point(2, 1)]
    )
    assert len(local_triangulation(square_center)) == 4
    assert local_triangulation([Point(0, 0), Point(1, 1), Point(2, 2)]) == []


def test_local_triangulation_counts_and_validates():
    rng = random.Random(13)
    for count in (4, 6, 9):
        for _ in range(15):
            pts = _gp_points(rng, count)
            tris = local_triangulation(pts)
            h = len(hull_oracle(pts))
            assert len(tris) == 2 * count - h - 2
            assert triangulation_validator(pts, tris).passed


def test_wedge_accepts_convex_corner():
    prev, v, nxt = Point(0, 2), Point(0, 0), Point(2, 0)
    assert wedge_accepts(prev, v, nxt, Point(1, 1))
    assert not wedge_accepts(prev, v, nxt, Point(-1, 1))
    assert not wedge_accepts(prev, v, nxt, Point(1, -1))


def test_wedge_accepts_reflex_corner():
    prev, v, nxt = Point(0, 2), Point(0, 0), Point(-2, 0)
    assert wedge_accepts(prev, v, nxt, Point(1, 1))
    assert wedge_accepts(prev, v, nxt, Point(1, -1))
    assert wedge_accepts(prev, v, nxt, Point(-1, -1))
    assert not wedge_accepts(prev, v, nxt, Point(-1, 1))


def test_mate_key_smallest_area_then_point_then_slot():
    key = mate_key(Point(0, 0), Point(4, 0))
    pool = [(Point(1, 3), 2), (Point(2, 1), 5), (Point(2, 1), 3)]
    assert min(pool, key=key) == (Point(2, 1), 3)


def test_corner_wedge_walks_the_cycle():
    c = Corridor(0, 2, 10, 11, Point(0, 5), Point(0, 0), Point(4, 5), Point(4, 0))
    inner_l, inner_r = Point(0, 3), Point(4, 2)
    assert c.corner_wedge(0, inner_l) == (Point(4, 5), Point(0, 5), inner_l)
    assert c.corner_wedge(2, inner_l) == (inner_l, Point(0, 0), Point(4, 0))
    assert c.corner_wedge(10, inner_r) == (inner_r, Point(4, 5), Point(0, 5))
    assert c.corner_wedge(11, inner_r) == (Point(0, 0), Point(4, 0), inner_r)
    with pytest.raises(ProtocolError):
        c.corner_wedge(1, inner_l)
    with pytest.raises(ProtocolError):
        c.corner_wedge(0, None)


def test_corner_wedge_single_slot_chain():
    c = Corridor(0, 0, 10, 11, Point(0, 3), Point(0, 3), Point(4, 5), Point(4, 0))
    assert c.corner_wedge(0, None) == (Point(4, 5), Point(0, 3), Point(4, 0))


def test_split_corridor_children_share_the_diagonal():
    c = Corridor(0, 2, 10, 11, Point(0, 5), Point(0, 0), Point(4, 5), Point(4, 0))
    assert c.x_is_left
    assert c.median_slot() == 1
    v_pt, u_pt = Point(0, 2), Point(4, 0)
    top, bot = split_corridor(c, 1, 11, v_pt, u_pt)
    assert (top.l_lo, top.l_hi, top.r_lo, top.r_hi) == (0, 1, 10, 11)
    assert (bot.l_lo, bot.l_hi, bot.r_lo, bot.r_hi) == (1, 2, 11, 11)
    assert top.lb == v_pt and top.rb == u_pt
    assert bot.lt == v_pt and bot.rt == u_pt
    assert top.total + bot.total == c.total + 2


def test_triangulate_corridor_fan_from_single_vertex():
    left = [Point(0, 3)]
    right = [Point(4, 6), Point(5, 3), Point(4, 0)]
    tris = triangulate_corridor(left, right)
    assert _tiling_ok(polygon_cycle(left, right), tris)


def test_triangulate_corridor_handles_a_reflex_wall():
    left = [Point(0, 6), Point(2, 4), Point(0, 2)]
    right = [Point(6, 6), Point(6, 2)]
    tris = triangulate_corridor(left, right)
    assert _tiling_ok(polygon_cycle(left, right), tris)


def test_triangulate_corridor_tiles_convex_cycles():
    for n, seed in ((2, 0), (2, 5), (4, 0), (4, 3)):
        hull = list(hull_oracle(_flat(generate("convex-circle", n, seed))))
        cyc = [hull[0]] + hull[:0:-1]
        for k in (1, len(cyc) // 2, len(cyc) - 1):
            left = cyc[:k]
            right = cyc[:k - 1 - len(cyc):-1]
            assert polygon_cycle(left, right) == cyc
            assert _tiling_ok(cyc, triangulate_corridor(left, right))


def test_corridor_recursion_depth_is_logarithmic(monkeypatch):
    real = tri_mod._corridor_rec
    depth = {"cur": 0, "max": 0}

    def wrapper(left, right, la, lb, ra, rb, out):
        depth["cur"] += 1
        depth["max"] = max(depth["max"], depth["cur"])
        try:
            real(left, right, la, lb, ra, rb, out)
        finally:
            depth["cur"] -= 1

    monkeypatch.setattr(tri_mod, "_corridor_rec", wrapper)
    hull = list(hull_oracle(_flat(generate("convex-circle", 8, 0))))
    cyc = [hull[0]] + hull[:0:-1]
    left = cyc[: len(cyc) // 2]
    right = cyc[: len(cyc) // 2 - 1 - len(cyc) : -1]
    tris = tri_mod.triangulate_corridor(left, right)
    assert _tiling_ok(cyc, tris)
    assert depth["max"] <= 2 * _ceil_log2(len(cyc)) + 2


def test_pack2_roundtrip():
    base = 17 * 17 + 3
    for a in (0, 1, 17, base - 1):
        for b in (0, 2, base - 1):
            assert tri_mod._unpack2(tri_mod._pack2(a, b, base), base) == (a, b)


def test_single_node_fans_around_interior_point():
    pts = [Point(0, 0), Point(4, 0), Point(4, 4), Point(0, 4), Point(2, 1)]
    outputs, metrics = run_protocol(
        EngineConfig(n=1), triangulation_program, {1: pts}
    )
    tris, total = outputs[1]
    assert total == 4 and len(tris) == 4
    assert triangulation_validator(pts, tris).passed
    assert metrics.rounds_total == 0


def test_two_nodes_triangulate_a_quad():
    pts = [Point(0, 0), Point(4, 0), Point(0, 3), Point(4, 3)]
    payloads = {1: pts[:2], 2: pts[2:]}
    outputs, metrics = run_protocol(
        EngineConfig(n=2), triangulation_program, payloads
    )
    tris = [t for i in (1, 2) for t in outputs[i][0]]
    assert {outputs[i][1] for i in (1, 2)} == {2}
    assert len(tris) == 2
    assert triangulation_validator(pts, tris).passed
    assert metrics.violations == []


def test_clique_size_must_be_a_power_of_two():
    with pytest.raises(NotPowerOfTwo):
        run_trial("triangulate", 3, "uniform", 0)


def test_distributed_runs_verify_across_generators():
    for n, gen, seed in (
        (2, "uniform", 0),
        (2, "uniform", 1),
        (2, "convex-circle", 0),
        (2, "parabola", 0),
        (4, "uniform", 0),
        (4, "uniform", 7),
        (4, "convex-circle", 2),
    ):
        outcome = run_trial("triangulate", n, gen, seed)
        assert outcome.verified, (n, gen, seed)
        assert outcome.violations == ()
        assert outcome.max_outdeg <= n - 1
