"""Distributed triangulation: local sweeps plus hull-merge corridor filling.

After a global sort each node triangulates its own batch; log2(n) merge
phases then pair up node groups, compute the merged hull, and triangulate
the corridor polygon pinched between the two half hulls and their two
common supporting segments.

A corridor lives in fixed point slots (left boundary chain top to bottom,
then right chain) that never move; recursion splits a corridor in place by
a cross-chain diagonal.  Every node holding an inner slot of a corridor
tracks its descriptor (slot ranges plus the four corner points), which
makes corridors of four or fewer vertices resolvable without messages; the
per-level exchanges for bigger corridors ride three batched routing steps
(median publication, mate candidates, split publication).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .engine import NodeCtx, _atoms
from .errors import (
    DuplicatePoint,
    NoMateFound,
    NotPowerOfTwo,
    ProtocolError,
)
from .geometry import (
    COLLINEAR,
    LEFT,
    RIGHT,
    Point,
    cross,
    lower_scan,
    orientation,
    upper_scan,
)
from .hull_common import gather_bounds
from .log_hull import marked_paths
from .primitives import all_gather_one, route, route_batched, sort_points

Triangle = tuple[Point, Point, Point]


def ccw(a: Point, b: Point, c: Point) -> Triangle:
    """The triangle as a counterclockwise vertex triple."""
    if orientation(a, b, c) == RIGHT:
        return (a, c, b)
    return (a, b, c)


def local_triangulation(pts: Sequence[Point]) -> list[Triangle]:
    """Triangulate a sorted batch by emitting every scan pop as a triangle.

    Degenerate (collinear) pops enclose no area and are dropped, so fully
    collinear batches yield no triangles.  For points in general position
    the count is exactly 2k - h - 2.
    """
    tris: list[Triangle] = []
    for sign in (1, -1):
        chain: list[Point] = []
        for p in pts:
            while len(chain) >= 2 and sign * cross(chain[-2], chain[-1], p) >= 0:
                b = chain.pop()
                if orientation(chain[-1], b, p) != COLLINEAR:
                    tris.append(ccw(chain[-1], b, p))
            chain.append(p)
    return tris


def wedge_accepts(prev: Point, v: Point, nxt: Point, u: Point) -> bool:
    """Does segment (v, u) leave v strictly into the polygon interior?

    prev and nxt are v's polygon neighbours with the interior to the left
    of prev->v->nxt; u is assumed not collinear with either incident edge.
    """
    into_a = orientation(prev, v, u) == LEFT
    into_b = orientation(v, nxt, u) == LEFT
    if orientation(prev, v, nxt) == LEFT:
        return into_a and into_b
    return into_a or into_b


def mate_valid(
    v: Point,
    v_prev: Point,
    v_next: Point,
    u: Point,
    u_prev: Point,
    u_next: Point,
) -> bool:
    """Local interior test for diagonal (v, u) at both endpoints."""
    return wedge_accepts(v_prev, v, v_next, u) and wedge_accepts(
        u_prev, u, u_next, v
    )


@dataclass(frozen=True)
class Corridor:
    """A live corridor: inclusive slot ranges per boundary chain and the
    point values at the four range ends.

    Slot order is top to bottom on both chains; the polygon walks the left
    range down, crosses to the right range bottom, walks it up, and closes
    over the top, which makes the cycle counterclockwise.
    """

    l_lo: int
    l_hi: int
    r_lo: int
    r_hi: int
    lt: Point
    lb: Point
    rt: Point
    rb: Point

    @property
    def ident(self) -> tuple[int, int]:
        return (self.l_lo, self.r_lo)

    @property
    def left_len(self) -> int:
        return self.l_hi - self.l_lo + 1

    @property
    def right_len(self) -> int:
        return self.r_hi - self.r_lo + 1

    @property
    def total(self) -> int:
        return self.left_len + self.right_len

    @property
    def x_is_left(self) -> bool:
        """The split chain is the longer one; ties go to the left chain."""
        return self.left_len >= self.right_len

    def x_range(self) -> tuple[int, int]:
        return (self.l_lo, self.l_hi) if self.x_is_left else (self.r_lo, self.r_hi)

    def y_range(self) -> tuple[int, int]:
        return (self.r_lo, self.r_hi) if self.x_is_left else (self.l_lo, self.l_hi)

    def median_slot(self) -> int:
        lo, hi = self.x_range()
        return lo + (hi - lo) // 2

    def interior_slots(self) -> list[int]:
        out = list(range(self.l_lo + 1, self.l_hi))
        out.extend(range(self.r_lo + 1, self.r_hi))
        return out

    def y_interior_slots(self) -> list[int]:
        lo, hi = self.y_range()
        return list(range(lo + 1, hi))

    def corner_point(self, slot: int) -> Point:
        if slot == self.l_lo:
            return self.lt
        if slot == self.l_hi:
            return self.lb
        if slot == self.r_lo:
            return self.rt
        if slot == self.r_hi:
            return self.rb
        raise ProtocolError(f"slot {slot} is not a corner")

    def corner_wedge(self, slot: int, inner_pt: Point | None):
        """(prev, here, next) for a corner vertex in cycle order.

        inner_pt is the point one slot inward along the corner's own chain;
        it is ignored when that chain is a single slot.
        """
        here = self.corner_point(slot)
        if slot in (self.l_lo, self.l_hi):
            if self.l_lo == self.l_hi:
                return self.rt, here, self.rb
            if slot == self.l_lo:
                prev, nxt = self.rt, inner_pt
            else:
                prev, nxt = inner_pt, self.rb
        else:
            if self.r_lo == self.r_hi:
                return self.lb, here, self.lt
            if slot == self.r_lo:
                prev, nxt = inner_pt, self.lt
            else:
                prev, nxt = self.lb, inner_pt
        if prev is None or nxt is None:
            raise ProtocolError("corner wedge needs the inward neighbour point")
        return prev, here, nxt


def split_corridor(
    c: Corridor, v_slot: int, u_slot: int, v_pt: Point, u_pt: Point
) -> tuple[Corridor, Corridor]:
    """Children of the split along diagonal (v, u); both keep the diagonal
    slots, the top child first."""
    if c.x_is_left:
        lv, ru = v_slot, u_slot
        lv_pt, ru_pt = v_pt, u_pt
    else:
        lv, ru = u_slot, v_slot
        lv_pt, ru_pt = u_pt, v_pt
    top = Corridor(c.l_lo, lv, c.r_lo, ru, c.lt, lv_pt, c.rt, ru_pt)
    bot = Corridor(lv, c.l_hi, ru, c.r_hi, lv_pt, c.lb, ru_pt, c.rb)
    return top, bot


def mate_key(v: Point, v_next: Point):
    """Deterministic mate choice: smallest doubled area with v's forward
    neighbour, then lexicographically smallest mate point, then slot."""

    def key(entry: tuple[Point, int]):
        u, slot = entry
        return (abs(cross(v, u, v_next)), u, slot)

    return key


def polygon_cycle(left: Sequence[Point], right: Sequence[Point]) -> list[Point]:
    """Corridor polygon as a counterclockwise cycle (left top->bottom chain,
    right chain walked bottom->top)."""
    return list(left) + list(reversed(right))


def triangulate_corridor(
    left: Sequence[Point], right: Sequence[Point]
) -> list[Triangle]:
    """Sequential reference recursion for one corridor polygon.

    Applies exactly the distributed rules: median of the longer chain (tie
    to the left), wedge-tested cross-chain mates chosen by smallest doubled
    area, in-place splits, direct emission at four or fewer vertices.
    """
    la, lb = 0, len(left) - 1
    ra, rb = 0, len(right) - 1
    if lb < la or rb < ra:
        raise ProtocolError("corridor requires both chains nonempty")
    out: list[Triangle] = []
    _corridor_rec(list(left), list(right), la, lb, ra, rb, out)
    return out


def _cycle_of(left, right, la, lb, ra, rb) -> list[Point]:
    return polygon_cycle(left[la : lb + 1], right[ra : rb + 1])


def _corridor_rec(left, right, la, lb, ra, rb, out) -> None:
    a = lb - la + 1
    b = rb - ra + 1
    total = a + b
    if total <= 2:
        return
    cyc = _cycle_of(left, right, la, lb, ra, rb)
    if total == 3:
        out.append(ccw(*cyc))
        return
    if total == 4:
        out.extend(_emit_quad(cyc))
        return
    x_is_left = a >= b
    if x_is_left:
        m = la + (lb - la) // 2
        v, v_prev, v_next = left[m], left[m - 1], left[m + 1]
    else:
        m = ra + (rb - ra) // 2
        v, v_prev, v_next = right[m], right[m + 1], right[m - 1]
    pool: list[tuple[Point, int]] = []
    if x_is_left:
        y_pts = [(right[k], k) for k in range(ra, rb + 1)]
    else:
        y_pts = [(left[k], k) for k in range(la, lb + 1)]
    for u, k in y_pts:
        u_prev, u_next = _neighbors_in(left, right, la, lb, ra, rb, k, x_is_left)
        if mate_valid(v, v_prev, v_next, u, u_prev, u_next):
            pool.append((u, k))
    if not pool:
        raise NoMateFound(f"no cross-chain mate for {v}")
    u, k = min(pool, key=mate_key(v, v_next))
    if x_is_left:
        _corridor_rec(left, right, la, m, ra, k, out)
        _corridor_rec(left, right, m, lb, k, rb, out)
    else:
        _corridor_rec(left, right, la, k, ra, m, out)
        _corridor_rec(left, right, k, lb, m, rb, out)


def _neighbors_in(left, right, la, lb, ra, rb, k, x_is_left):
    """Polygon neighbours (prev, next) of the y-chain vertex at index k."""
    if x_is_left:
        prev = right[k + 1] if k < rb else left[lb]
        nxt = right[k - 1] if k > ra else left[la]
    else:
        prev = left[k - 1] if k > la else right[ra]
        nxt = left[k + 1] if k < lb else right[rb]
    return prev, nxt


def _emit_quad(cyc: list[Point]) -> list[Triangle]:
    """Split a simple ccw quadrilateral along an interior diagonal.

    A diagonal is usable only when the other two vertices lie strictly on
    opposite sides of it; a simple quad always has at least one such.
    """
    a, b, c, d = cyc
    if orientation(a, c, b) * orientation(a, c, d) == -1:
        return [ccw(a, b, c), ccw(a, c, d)]
    if orientation(b, d, a) * orientation(b, d, c) == -1:
        return [ccw(b, c, d), ccw(b, d, a)]
    raise NoMateFound(f"quadrilateral {cyc} admits no interior diagonal")


# ---------------------------------------------------------------------------
# Distributed protocol
# ---------------------------------------------------------------------------


@dataclass
class _Slot:
    """A placed corridor vertex plus its same-chain neighbour points."""

    pt: Point
    prev_pt: Point | None = None
    next_pt: Point | None = None


class _Phase:
    """One node's view of a merge phase.

    Slots index the two chain sections contiguously (left chain before the
    seam, right chain after), dealt to group members in windows of cap
    consecutive slots.  cap can exceed the per-node batch size by one: when
    both chain attachments land on a half's extreme point, that point fills
    two slots.  live maps corridor idents to descriptors for corridors in
    which this node holds at least one interior slot.
    """

    def __init__(self, ctx: NodeCtx, members: range, seam: int, right_len: int):
        self.ctx = ctx
        self.members = members
        self.seam = seam
        self.right_len = right_len
        self.cap = max(1, -(-(seam + right_len) // len(members)))
        self.slots: dict[int, _Slot] = {}
        self.live: dict[tuple[int, int], Corridor] = {}

    def holder(self, slot: int) -> int:
        return self.members[slot // self.cap]

    def chain_range(self, slot: int) -> tuple[int, int]:
        if slot < self.seam:
            return 0, self.seam - 1
        return self.seam, self.seam + self.right_len - 1

    def polygon_wedge(self, slot: int) -> tuple[Point, Point]:
        """Cycle neighbours (prev, next) of a chain-interior slot I hold.

        The right chain is walked bottom to top in the cycle, so its stitch
        neighbours swap roles.
        """
        info = self.slots[slot]
        if info.prev_pt is None or info.next_pt is None:
            raise ProtocolError(f"slot {slot} is missing stitched neighbours")
        if slot < self.seam:
            return info.prev_pt, info.next_pt
        return info.next_pt, info.prev_pt

    def my_interior(self, c: Corridor) -> bool:
        return any(self.holder(s) == self.ctx.node for s in c.interior_slots())


def _pack2(a: int, b: int, base: int) -> int:
    return a * base + b


def _unpack2(v: int, base: int) -> tuple[int, int]:
    return divmod(v, base)


def _route_smart(ctx: NodeCtx, records: list, batched: bool = False):
    """Route records, short-circuiting those addressed to this node.

    Keeping local data off the wire preserves the routing caps for traffic
    that genuinely crosses the network.  The merged result is sorted the
    same way the engine sorts deliveries.
    """
    mine = [(ctx.node, t, tuple(f)) for d, t, f in records if d == ctx.node]
    rest = [r for r in records if r[0] != ctx.node]
    if batched:
        got = yield from route_batched(ctx, rest)
    else:
        got = yield from route(ctx, rest)
    got = list(got) + mine
    got.sort(key=lambda r: (r[0], r[1], _atoms(r[2])))
    return got


def _settle_small(ph: _Phase, c: Corridor, owner: int, tris: list) -> bool:
    """Emit a corridor of four or fewer vertices at its designated emitter.

    owner emits the all-corner shapes; a (3,1) shape is emitted by the
    holder of its single chain-interior slot.  Returns False when the
    corridor is big enough to need the level protocol.
    """
    t = c.total
    me = ph.ctx.node
    if t <= 2:
        return True
    if t == 3:
        if owner == me:
            if c.left_len == 2:
                tris.append(ccw(c.lt, c.lb, c.rt))
            else:
                tris.append(ccw(c.lt, c.rb, c.rt))
        return True
    if t == 4:
        if c.left_len == 2:
            if owner == me:
                tris.extend(_emit_quad([c.lt, c.lb, c.rb, c.rt]))
            return True
        mid = c.l_lo + 1 if c.left_len == 3 else c.r_lo + 1
        if ph.holder(mid) == me:
            m = ph.slots[mid].pt
            if c.left_len == 3:
                prev, nxt, u = c.lt, c.lb, c.rt
            else:
                prev, nxt, u = c.rb, c.rt, c.lt
            tris.append(ccw(prev, m, u))
            tris.append(ccw(m, nxt, u))
        return True
    return False


def _my_mate_candidates(
    ph: _Phase, c: Corridor, v: Point, v_prev: Point, v_next: Point
) -> list[tuple[Point, int]]:
    """Wedge-valid mates for v among the short-chain vertices I can test:
    my interior slots plus any corner whose inward neighbour slot is mine."""
    me = ph.ctx.node
    y_lo, y_hi = c.y_range()
    cands: list[tuple[Point, int]] = []
    for s in range(y_lo + 1, y_hi):
        if ph.holder(s) != me:
            continue
        u = ph.slots[s].pt
        u_prev, u_next = ph.polygon_wedge(s)
        if mate_valid(v, v_prev, v_next, u, u_prev, u_next):
            cands.append((u, s))
    for corner, inner in ((y_lo, y_lo + 1), (y_hi, y_hi - 1)):
        if ph.holder(inner) != me:
            continue
        u_prev, u, u_next = c.corner_wedge(corner, ph.slots[inner].pt)
        if mate_valid(v, v_prev, v_next, u, u_prev, u_next):
            cands.append((u, corner))
    return cands


def _corner_candidates(
    c: Corridor, v: Point, v_prev: Point, v_next: Point
) -> list[tuple[Point, int]]:
    """Mate candidates when the short chain is all corners (length 1 or 2);
    everything needed is already in the descriptor."""
    y_lo, y_hi = c.y_range()
    out: list[tuple[Point, int]] = []
    for corner in sorted({y_lo, y_hi}):
        inner = None
        if y_hi > y_lo:
            inner = c.corner_point(y_hi if corner == y_lo else y_lo)
        u_prev, u, u_next = c.corner_wedge(corner, inner)
        if mate_valid(v, v_prev, v_next, u, u_prev, u_next):
            out.append((u, corner))
    return out


def _level_loop(ctx: NodeCtx, ph: _Phase, tris: list):
    """Split every live corridor once per iteration until none remain.

    Each level runs a fixed stage sequence so all groups stay in lockstep:
    a liveness gather, median broadcasts to short-chain holders, candidate
    replies to the median holder, and split broadcasts to interior holders.
    Corridors whose short chain is all corners skip the first two routes;
    children of four or fewer vertices are emitted on the spot.
    """
    base = ctx.n * ctx.n + 3
    while True:
        flags = yield from all_gather_one(ctx, "lvl-live", 1 if ph.live else 0)
        if not any(f[0] for f in flags.values()):
            return
        # Every fan-out below runs as two instances keyed by the parity of
        # the smallest slot the recipient holds in the corridor: interiors
        # of live corridors are disjoint, so those slots are distinct within
        # a recipient's cap-wide window and each parity class stays within
        # the per-sink routing cap.
        mh_state: dict[tuple[int, int], tuple] = {}
        a_recs: tuple[list, list] = ([], [])
        for key, c in sorted(ph.live.items()):
            vs = c.median_slot()
            if ph.holder(vs) != ctx.node:
                continue
            v = ph.slots[vs].pt
            v_prev, v_next = ph.polygon_wedge(vs)
            mh_state[key] = (c, vs, v, v_prev, v_next)
            y_inner = c.y_interior_slots()
            if y_inner:
                pid = _pack2(key[0], key[1], base)
                first: dict[int, int] = {}
                for s in y_inner:
                    first.setdefault(ph.holder(s), s)
                for nd, smin in sorted(first.items()):
                    a_recs[smin % 2].append((nd, "tri-a", (pid, v, v_prev, v_next)))
        got_a = yield from _route_smart(ctx, a_recs[0], batched=True)
        got_a += yield from _route_smart(ctx, a_recs[1], batched=True)

        b_recs: tuple[list, list] = ([], [])
        for _src, _tag, fields in got_a:
            pid, v, v_prev, v_next = fields
            key = _unpack2(pid, base)
            c = ph.live.get(key)
            if c is None:
                raise ProtocolError(f"median for untracked corridor {key}")
            smin = min(s for s in c.y_interior_slots() if ph.holder(s) == ctx.node)
            cands = _my_mate_candidates(ph, c, v, v_prev, v_next)
            if cands:
                u, us = min(cands, key=mate_key(v, v_next))
                dst = ph.holder(c.median_slot())
                b_recs[smin % 2].append((dst, "tri-b", (pid, u, us)))
        got_b = yield from _route_smart(ctx, b_recs[0])
        got_b += yield from _route_smart(ctx, b_recs[1])

        pools: dict[tuple[int, int], list[tuple[Point, int]]] = {}
        for _src, _tag, (pid, u, us) in got_b:
            pools.setdefault(_unpack2(pid, base), []).append((u, us))
        c_recs: tuple[list, list] = ([], [])
        for key, (c, vs, v, v_prev, v_next) in sorted(mh_state.items()):
            if c.y_interior_slots():
                pool = pools.get(key, [])
            else:
                pool = _corner_candidates(c, v, v_prev, v_next)
            if not pool:
                raise NoMateFound(
                    f"corridor {key}: no valid mate for split vertex {v}"
                )
            u, us = min(pool, key=mate_key(v, v_next))
            pid = _pack2(key[0], key[1], base)
            pslots = _pack2(vs, us, base)
            first = {}
            for s in c.interior_slots():
                first.setdefault(ph.holder(s), s)
            for nd, smin in sorted(first.items()):
                c_recs[smin % 2].append((nd, "tri-c", (pid, pslots, v, u)))
        got_c = yield from _route_smart(ctx, c_recs[0], batched=True)
        got_c += yield from _route_smart(ctx, c_recs[1], batched=True)

        for _src, _tag, (pid, pslots, v, u) in got_c:
            key = _unpack2(pid, base)
            c = ph.live.pop(key, None)
            if c is None:
                raise ProtocolError(f"split for untracked corridor {key}")
            vs, us = _unpack2(pslots, base)
            owner = ph.holder(c.median_slot())
            for child in split_corridor(c, vs, us, v, u):
                if _settle_small(ph, child, owner, tris):
                    continue
                if ph.my_interior(child):
                    ph.live[child.ident] = child


def _merge_phase(
    ctx: NodeCtx,
    batch: list[Point],
    phase_idx: int,
    prev_upper: list[Point],
    prev_lower: list[Point],
    tris: list,
):
    """Pair up groups of 2**phase_idx nodes and fill the corridor between
    their hulls; returns this node's slice of the merged hull paths."""
    n = ctx.n
    g = 1 << phase_idx
    span = 2 * g
    group_base = ((ctx.node - 1) // span) * span + 1
    members = range(group_base, group_base + span)
    right_base = group_base + g
    in_left = ctx.node < right_base

    bounds = yield from gather_bounds(ctx, batch, members)
    new_upper, new_lower = yield from marked_paths(ctx, batch, members, bounds)

    # One exchange of merged-path endpoints pins down where the two
    # cross-half supporting segments attach.
    if new_upper and new_lower:
        payload = ("arc-b", new_upper[-1], new_upper[0], new_lower[-1], new_lower[0])
    elif new_upper:
        payload = ("arc-u", new_upper[-1], new_upper[0])
    elif new_lower:
        payload = ("arc-l", new_lower[-1], new_lower[0])
    else:
        payload = None
    if payload is not None:
        for dst in members:
            if dst != ctx.node:
                ctx.send(dst, *payload)
    inbox = yield
    ups: dict[int, tuple[Point, Point]] = {}
    los: dict[int, tuple[Point, Point]] = {}
    if new_upper:
        ups[ctx.node] = (new_upper[-1], new_upper[0])
    if new_lower:
        los[ctx.node] = (new_lower[-1], new_lower[0])
    for m in inbox:
        if m.tag in ("arc-b", "arc-u"):
            ups[m.src] = (m.fields[0], m.fields[1])
        if m.tag == "arc-b":
            los[m.src] = (m.fields[2], m.fields[3])
        elif m.tag == "arc-l":
            los[m.src] = (m.fields[0], m.fields[1])
    u_up = max(v[0] for i, v in ups.items() if i < right_base)
    w_up = min(v[1] for i, v in ups.items() if i >= right_base)
    u_lo = max(v[0] for i, v in los.items() if i < right_base)
    w_lo = min(v[1] for i, v in los.items() if i >= right_base)

    # My stretches of the two facing arcs, read off the previous phase's
    # hull paths.  The half's own extreme point appears on both of its
    # paths; dropping it from the lower arc keeps the cycle simple.
    if in_left:
        up_sec = [p for p in prev_upper if p >= u_up]
        lo_sec = [p for p in prev_lower if p >= u_lo]
        if ctx.node == right_base - 1 and lo_sec:
            lo_sec.pop()
    else:
        up_sec = [p for p in prev_upper if p <= w_up]
        lo_sec = [p for p in prev_lower if p <= w_lo]
        if ctx.node == right_base and lo_sec:
            lo_sec.pop(0)

    counts = yield from all_gather_one(ctx, "arc-n", len(up_sec), len(lo_sec))
    l_up = [counts[i][0] for i in members if i < right_base]
    l_lo = [counts[i][1] for i in members if i < right_base]
    r_up = [counts[i][0] for i in members if i >= right_base]
    r_lo = [counts[i][1] for i in members if i >= right_base]
    a_len = sum(l_up) + sum(l_lo)
    b_len = sum(r_up) + sum(r_lo)
    ph = _Phase(ctx, members, a_len, b_len)

    # Left chain runs top to bottom: the upper arc ascending, then the
    # lower arc descending.  The right chain mirrors this.
    mi = members.index(ctx.node)
    recs_up: list = []
    recs_lo: list = []
    if in_left:
        off = sum(l_up[:mi])
        for k, p in enumerate(up_sec):
            recs_up.append((off + k, p))
        rest = sum(l_lo[mi + 1 :])
        for k, p in enumerate(lo_sec):
            recs_lo.append((sum(l_up) + rest + len(lo_sec) - 1 - k, p))
    else:
        rj = mi - g
        rest = sum(r_up[rj + 1 :])
        for k, p in enumerate(up_sec):
            recs_up.append((a_len + rest + len(up_sec) - 1 - k, p))
        off = sum(r_lo[:rj])
        for k, p in enumerate(lo_sec):
            recs_lo.append((a_len + sum(r_up) + off + k, p))

    # Two placement instances split by slot parity: a recipient's window of
    # cap consecutive slots then contributes at most ceil(cap / 2) <= n
    # records to either instance.
    recs = recs_up + recs_lo
    placed = yield from _route_smart(
        ctx, [(ph.holder(s), "pl", (s, p)) for s, p in recs if s % 2 == 0]
    )
    placed += yield from _route_smart(
        ctx, [(ph.holder(s), "pl", (s, p)) for s, p in recs if s % 2 == 1]
    )
    for _src, _tag, (s, p) in placed:
        if s in ph.slots:
            raise ProtocolError(f"slot {s} filled twice")
        ph.slots[s] = _Slot(p)
    lo_slot = mi * ph.cap
    for s in range(lo_slot, min(lo_slot + ph.cap, a_len + b_len)):
        if s not in ph.slots:
            raise ProtocolError(f"slot {s} never filled")

    # Stitch chain neighbours across node boundaries; one message each way.
    for s in sorted(ph.slots):
        lo_r, hi_r = ph.chain_range(s)
        if s + 1 <= hi_r:
            if s + 1 in ph.slots:
                ph.slots[s].next_pt = ph.slots[s + 1].pt
                ph.slots[s + 1].prev_pt = ph.slots[s].pt
            else:
                ctx.send(ph.holder(s + 1), "st", s, ph.slots[s].pt)
        if s - 1 >= lo_r and s - 1 not in ph.slots:
            ctx.send(ph.holder(s - 1), "st", s, ph.slots[s].pt)
    inbox = yield
    for m in inbox:
        if m.tag != "st":
            continue
        k, p = m.fields
        if k + 1 in ph.slots and ph.chain_range(k) == ph.chain_range(k + 1):
            ph.slots[k + 1].prev_pt = p
        if k - 1 in ph.slots and ph.chain_range(k) == ph.chain_range(k - 1):
            ph.slots[k - 1].next_pt = p

    root = Corridor(0, a_len - 1, a_len, a_len + b_len - 1, u_up, u_lo, w_up, w_lo)
    if not _settle_small(ph, root, ph.holder(root.l_lo), tris):
        if ph.my_interior(root):
            ph.live[root.ident] = root

    yield from _level_loop(ctx, ph, tris)
    return new_upper, new_lower


def _collect(ctx: NodeCtx, tris: list):
    """Deal the triangles into contiguous global-rank batches, one range
    per node, striding the ranks so every routing instance stays feasible."""
    n = ctx.n
    tris.sort()
    counts = yield from all_gather_one(ctx, "tri-n", len(tris))
    total = sum(v[0] for v in counts.values())
    if total == 0:
        return [], 0
    before = sum(counts[i][0] for i in range(1, ctx.node))
    per_sink = -(-total // n)
    biggest = max(v[0] for v in counts.values())
    stride = -(-max(biggest, per_sink) // n)
    got: list = []
    for j in range(stride):
        recs = []
        for k, t in enumerate(tris):
            r = before + k
            if r % stride == j:
                recs.append((r // per_sink + 1, "tri-out", (r, *t)))
        got += yield from _route_smart(ctx, recs)
    got.sort(key=lambda rec: rec[2][0])
    return [tuple(rec[2][1:]) for rec in got], total


def triangulation_program(ctx: NodeCtx, batch: list[Point]):
    """Node program: triangulate the global point set.

    Returns (my rank batch of ccw triangles, global triangle count).
    Merge phases pair groups of doubling size, so n must be a power of two.
    """
    n = ctx.n
    if n & (n - 1):
        raise NotPowerOfTwo(f"merge pairing needs a power-of-two clique, got {n}")
    if n == 1:
        srt = sorted(batch)
        for i in range(1, len(srt)):
            if srt[i] == srt[i - 1]:
                raise DuplicatePoint(f"repeated point {srt[i]}")
        tris = sorted(local_triangulation(srt))
        return tris, len(tris)
    srt = yield from sort_points(ctx, batch)
    tris = local_triangulation(srt)
    upper, lower = upper_scan(srt), lower_scan(srt)
    for phase_idx in range(n.bit_length() - 1):
        upper, lower = yield from _merge_phase(
            ctx, srt, phase_idx, upper, lower, tris
        )
    return (yield from _collect(ctx, tris))
