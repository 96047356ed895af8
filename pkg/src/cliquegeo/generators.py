"""Seeded point-set generators.

Every generator yields n batches of n distinct integer points with
nonnegative coordinates.  Batches are dealt row-major from the generated
order; the protocols' initial sort makes the dealing irrelevant to results
but keeps file input reproducible.
"""
from __future__ import annotations

import functools
import random
from math import gcd, isqrt
from pathlib import Path

from .errors import GenerationExhausted, PreconditionError
from .geometry import Point

GENERATOR_NAMES = ("uniform", "convex-circle", "parabola", "grid-jitter")


def generate(
    name: str, n: int, seed: int, general_position: bool = False
) -> list[list[Point]]:
    """n batches of n points from the named generator.

    general_position additionally rejects collinear triples (only the
    uniform generator samples, so only it honours the flag; the convex
    families are collinear-free by construction).
    """
    if n < 1:
        raise PreconditionError(f"clique size must be positive, got {n}")
    total = n * n
    if name == "uniform":
        pts = _uniform(total, seed, general_position)
    elif name == "convex-circle":
        pts = _convex_circle(total, seed)
    elif name == "parabola":
        pts = _parabola(total)
    elif name == "grid-jitter":
        pts = _grid_jitter(total, seed)
    elif name.startswith("file:"):
        pts = _from_file(name[len("file:") :], total)
    else:
        raise PreconditionError(f"unknown generator {name!r}")
    return [pts[i * n : (i + 1) * n] for i in range(n)]


def needed_bits(batches: list[list[Point]]) -> int:
    """Smallest coordinate width that fits every generated coordinate."""
    biggest = max((max(p.x, p.y) for batch in batches for p in batch), default=0)
    return max(2, biggest.bit_length())


def _uniform(total: int, seed: int, general_position: bool) -> list[Point]:
    rng = random.Random(seed)
    side = 1 << max(8, (total - 1).bit_length() + 2)
    pts: list[Point] = []
    taken: set[Point] = set()
    slopes: dict[Point, set[tuple[int, int]]] = {}
    attempts = 0
    cap = 2000 * total + 2000
    while len(pts) < total:
        attempts += 1
        if attempts > cap:
            raise GenerationExhausted(
                f"could not place {total} points in a {side}x{side} box"
            )
        p = Point(rng.randrange(side), rng.randrange(side))
        if p in taken:
            continue
        if general_position:
            new_slopes = []
            ok = True
            for q in pts:
                dx, dy = p.x - q.x, p.y - q.y
                g = gcd(abs(dx), abs(dy))
                s = (dx // g, dy // g)
                if s[0] < 0 or (s[0] == 0 and s[1] < 0):
                    s = (-s[0], -s[1])
                if s in slopes[q]:
                    ok = False
                    break
                new_slopes.append((q, s))
            if not ok:
                continue
            for q, s in new_slopes:
                slopes[q].add(s)
            slopes[p] = {s for _, s in new_slopes}
        pts.append(p)
        taken.add(p)
    return pts


def _parabola(total: int) -> list[Point]:
    return [Point(k, k * k) for k in range(total)]


def _grid_jitter(total: int, seed: int) -> list[Point]:
    """Points jittered inside disjoint grid cells; distinct by construction."""
    rng = random.Random(seed)
    cols = isqrt(total - 1) + 1
    cell = 16
    pts = []
    for k in range(total):
        i, j = k % cols, k // cols
        pts.append(
            Point(
                2 * cell * i + rng.randrange(cell),
                2 * cell * j + rng.randrange(cell),
            )
        )
    return pts


def _half(v: tuple[int, int]) -> int:
    return 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1


def _angle_cmp(u: tuple[int, int], v: tuple[int, int]) -> int:
    if _half(u) != _half(v):
        return _half(u) - _half(v)
    c = u[0] * v[1] - u[1] * v[0]
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


def _convex_circle(total: int, seed: int) -> list[Point]:
    """A strictly convex lattice polygon with exactly `total` vertices.

    Edge vectors are distinct primitive directions sorted by angle; the
    final edge closes the walk, so every vertex is a strict hull corner.
    """
    if total < 3:
        return _parabola(total)
    rng = random.Random(seed)
    reach = 2
    prim: list[tuple[int, int]] = []
    while len(prim) < total + 8:
        reach += 1
        prim = [
            (a, b)
            for a in range(-reach, reach + 1)
            for b in range(-reach, reach + 1)
            if (a, b) != (0, 0) and gcd(abs(a), abs(b)) == 1
        ]
    for _ in range(200):
        rng.shuffle(prim)
        chosen = prim[: total - 1]
        sx = -sum(a for a, _ in chosen)
        sy = -sum(b for _, b in chosen)
        if (sx, sy) == (0, 0):
            continue
        g = gcd(abs(sx), abs(sy))
        if (sx // g, sy // g) in set(chosen):
            continue
        edges = chosen + [(sx, sy)]
        edges.sort(key=functools.cmp_to_key(_angle_cmp))
        x = y = 0
        verts = []
        for dx, dy in edges:
            verts.append((x, y))
            x += dx
            y += dy
        if (x, y) != (0, 0):
            raise GenerationExhausted("convex polygon walk failed to close")
        min_x = min(v[0] for v in verts)
        min_y = min(v[1] for v in verts)
        return [Point(vx - min_x, vy - min_y) for vx, vy in verts]
    raise GenerationExhausted(
        f"no closing edge direction found for a {total}-vertex convex polygon"
    )


def _from_file(path: str, total: int) -> list[Point]:
    lines = Path(path).read_text().split()
    if len(lines) % 2:
        raise PreconditionError(f"{path}: expected whitespace-separated x y pairs")
    coords = []
    for tok in lines:
        try:
            coords.append(int(tok))
        except ValueError as exc:
            raise PreconditionError(f"{path}: non-integer coordinate {tok!r}") from exc
    pts = [Point(coords[i], coords[i + 1]) for i in range(0, len(coords), 2)]
    if len(pts) != total:
        raise PreconditionError(
            f"{path}: holds {len(pts)} points, need exactly {total}"
        )
    for p in pts:
        if p.x < 0 or p.y < 0:
            raise PreconditionError(f"{path}: coordinates must be nonnegative: {p}")
    return pts
