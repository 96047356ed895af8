"""Shared helpers for building exact-integer test instances."""
import random

from cliquegeo.geometry import Point


def random_points(rng: random.Random, count: int, span: int = 200) -> list[Point]:
    """Distinct lattice points, sorted lexicographically."""
    pts: set[Point] = set()
    while len(pts) < count:
        pts.add(Point(rng.randrange(span), rng.randrange(span)))
    return sorted(pts)


def random_chain(rng: random.Random, size: int, x_lo: int, x_hi: int) -> list[Point]:
    """Strict upper chain with exactly `size` vertices inside [x_lo, x_hi).

    Strictly decreasing edge slopes make every interior turn a strict right
    turn, so the result is a valid chain at any requested size.
    """
    xs = sorted(rng.sample(range(x_lo, x_hi), size))
    y = rng.randrange(0, 50)
    chain = [Point(xs[0], y)]
    if size > 1:
        slopes = sorted(rng.sample(range(-3 * size, 3 * size), size - 1), reverse=True)
        for k in range(1, size):
            y += slopes[k - 1] * (xs[k] - xs[k - 1])
            chain.append(Point(xs[k], y))
    return chain
