"""Collective helpers layered on the engine: broadcast, gather, sort, route.

All helpers are generator functions meant to be driven with ``yield from``
inside a node program.  Each costs the documented number of rounds; with a
single node they return immediately and cost zero rounds.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .engine import Message, NodeCtx, RouteRequest, SortRequest
from .errors import ProtocolError
from .geometry import Point

Record = tuple[int, str, tuple]


def broadcast_from(ctx: NodeCtx, src: int, tag: str, *fields):
    """One node's fields delivered to everyone; costs 1 round, returns fields."""
    if ctx.n == 1:
        return fields
    if ctx.node == src:
        for dst in range(1, ctx.n + 1):
            if dst != src:
                ctx.send(dst, tag, *fields)
        yield
        return fields
    inbox: list[Message] = yield
    for m in inbox:
        if m.src == src and m.tag == tag:
            return m.fields
    raise ProtocolError(f"node {ctx.node} missed broadcast {tag!r} from {src}")


def all_gather_one(ctx: NodeCtx, tag: str, *fields):
    """Every node's fields delivered to every node; costs 1 round.

    Returns {node_id: fields} covering all n nodes, own entry included.
    """
    out = {ctx.node: fields}
    if ctx.n == 1:
        return out
    for dst in range(1, ctx.n + 1):
        if dst != ctx.node:
            ctx.send(dst, tag, *fields)
    inbox: list[Message] = yield
    for m in inbox:
        if m.tag == tag:
            out[m.src] = m.fields
    if len(out) != ctx.n:
        raise ProtocolError(f"gather {tag!r} incomplete at node {ctx.node}")
    return out


def sort_points(ctx: NodeCtx, points: Sequence[Point]):
    """Global sort collective; node i returns ranks (i-1)n+1 .. in."""
    result = yield SortRequest(points)
    return result


def route(ctx: NodeCtx, records: Iterable[Record]):
    """Single routing collective; every endpoint carries at most n records.

    Returns delivered records as (src, tag, fields), deterministically sorted.
    """
    result = yield RouteRequest(records)
    return result


def route_batched(ctx: NodeCtx, records: Sequence[Record]):
    """Route arbitrarily many records per source in agreed feasible slices.

    Costs 1 round to agree on the slice count K = ceil(max source load / n),
    then K routing invocations; sources stay within the per-node cap by
    construction.  Sink caps are the caller's responsibility.
    """
    loads = yield from all_gather_one(ctx, "route-load", len(records))
    heaviest = max(f[0] for f in loads.values())
    slices = max(1, -(-heaviest // ctx.n))
    delivered = []
    for j in range(slices):
        chunk = records[j * ctx.n : (j + 1) * ctx.n]
        delivered.extend((yield RouteRequest(chunk)))
    return delivered
