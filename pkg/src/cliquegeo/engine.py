"""Deterministic lockstep simulator for an all-to-all message-passing round model.

Node programs are generators.  A bare ``yield`` is a round barrier and
resumes with the node's inbox (messages sent to it in the previous round,
sorted by sender).  Yielding a :class:`SortRequest` or :class:`RouteRequest`
joins a global collective that every still-running node must enter in the
same slot; collectives are charged ``primitive_round_cost`` rounds.

Every direct send and every routed record is charged against the
per-message bit budget: 16 bits for the tag plus ``2 * coord_bits`` per
field, where a field is a :class:`~cliquegeo.geometry.Point` or an int.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator

from .errors import (
    BudgetViolation,
    CongestionViolation,
    DuplicatePoint,
    InfeasibleRouting,
    NonTermination,
    PreconditionError,
    ProtocolError,
)
from .geometry import Point


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length() if x > 1 else 0


@dataclass(frozen=True)
class EngineConfig:
    """Simulation parameters; zero means "use the documented default"."""

    n: int
    coord_bits: int = 0
    msg_bit_budget: int = 0
    primitive_round_cost: int = 1
    seed: int = 0
    max_rounds: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise PreconditionError(f"need at least one node, got {self.n}")
        if self.coord_bits == 0:
            object.__setattr__(
                self, "coord_bits", max(8, _ceil_log2(self.n * self.n) + 2)
            )
        if self.coord_bits < 2:
            raise PreconditionError(f"coordinate width {self.coord_bits} below 2")
        if self.msg_bit_budget == 0:
            object.__setattr__(self, "msg_bit_budget", 8 * self.coord_bits + 64)
        if self.msg_bit_budget < 2 * self.coord_bits + 8:
            raise PreconditionError(
                f"bit budget {self.msg_bit_budget} cannot carry one point"
            )
        if self.primitive_round_cost < 1:
            raise PreconditionError("primitive round cost must be at least 1")
        if self.max_rounds == 0:
            object.__setattr__(self, "max_rounds", 64 * self.n)
        if self.max_rounds < 1:
            raise PreconditionError("round ceiling must be positive")


@dataclass(slots=True)
class Message:
    src: int
    dst: int
    tag: str
    fields: tuple
    bits: int


class SortRequest:
    """Collective: merge all contributed points, sort, deal back n per node."""

    __slots__ = ("points",)

    def __init__(self, points: Iterable[Point]):
        self.points = list(points)


class RouteRequest:
    """Collective: deliver (dst, tag, fields) records, at most n per endpoint."""

    __slots__ = ("records",)

    def __init__(self, records: Iterable[tuple]):
        self.records = [(d, t, tuple(f)) for d, t, f in records]


@dataclass
class RunMetrics:
    rounds_total: int = 0
    max_message_bits: int = 0
    messages_total: int = 0
    max_out_degree: int = 0
    per_round_out_degree: dict[int, dict[int, int]] = field(default_factory=dict)
    primitive_invocations: dict[str, int] = field(
        default_factory=lambda: {"sort": 0, "route": 0}
    )
    violations: list[str] = field(default_factory=list)
    trace: list[tuple[int, int, int, int, str]] | None = None

    def to_json(self) -> dict:
        return {
            "rounds_total": self.rounds_total,
            "max_message_bits": self.max_message_bits,
            "primitive_invocations": dict(self.primitive_invocations),
            "violations": list(self.violations),
        }


class NodeCtx:
    """Per-node handle: identity, config, and the send buffer for the slot."""

    __slots__ = ("node", "n", "config", "_outbox")

    def __init__(self, node: int, config: EngineConfig):
        self.node = node
        self.n = config.n
        self.config = config
        self._outbox: list[tuple[int, str, tuple]] = []

    def send(self, dst: int, tag: str, *fields) -> None:
        self._outbox.append((dst, tag, fields))


def _field_bits(fields: tuple, w: int, where: str) -> int:
    bits = 16
    for f in fields:
        if isinstance(f, Point) or isinstance(f, int):
            bits += 2 * w
        else:
            raise ProtocolError(f"{where}: field {f!r} is not a Point or int")
    return bits


def _atoms(fields: tuple) -> tuple[int, ...]:
    out: list[int] = []
    for f in fields:
        if isinstance(f, Point):
            out.extend((f.x, f.y))
        else:
            out.append(int(f))
    return tuple(out)


def run_protocol(
    config: EngineConfig,
    program: Callable[[NodeCtx, Any], Iterator],
    payloads: dict[int, Any] | None = None,
    collect_trace: bool = False,
) -> tuple[dict[int, Any], RunMetrics]:
    """Run one generator per node in lockstep; returns (outputs, metrics)."""
    n = config.n
    metrics = RunMetrics(trace=[] if collect_trace else None)
    ctxs = {i: NodeCtx(i, config) for i in range(1, n + 1)}
    gens: dict[int, Iterator] = {}
    outputs: dict[int, Any] = {}
    feed: dict[int, Any] = {i: None for i in range(1, n + 1)}
    started = False

    for i in range(1, n + 1):
        gens[i] = program(ctxs[i], None if payloads is None else payloads.get(i))

    while True:
        sends: list[Message] = []
        yields: dict[int, Any] = {}
        for i in list(gens):
            ctx = ctxs[i]
            ctx._outbox = []
            halted = False
            try:
                if not started:
                    y = next(gens[i])
                else:
                    y = gens[i].send(feed[i])
            except StopIteration as stop:
                outputs[i] = stop.value
                del gens[i]
                halted = True
            if not halted:
                yields[i] = y
            for dst, tag, fields in ctx._outbox:
                if dst == i or not 1 <= dst <= n:
                    raise ProtocolError(f"node {i} sent to invalid destination {dst}")
                bits = _field_bits(fields, config.coord_bits, f"send {i}->{dst}")
                if bits > config.msg_bit_budget:
                    metrics.violations.append(f"budget:{i}->{dst}:{tag}:{bits}")
                    raise BudgetViolation(
                        f"message {tag} from {i} to {dst} needs {bits} bits, "
                        f"budget {config.msg_bit_budget}"
                    )
                sends.append(Message(i, dst, tag, fields, bits))
        started = True

        collective = [y for y in yields.values() if y is not None]
        if collective:
            kind = type(collective[0])
            if len(collective) != len(yields) or any(
                type(y) is not kind for y in collective
            ):
                raise ProtocolError("nodes diverged: mixed barrier and collective slot")
            if sends:
                raise ProtocolError("direct sends are not allowed in a collective slot")
            feed = _run_collective(kind, yields, gens, config, metrics)
            metrics.rounds_total += config.primitive_round_cost
        else:
            if not gens and not sends:
                break
            _check_congestion(sends)
            round_no = metrics.rounds_total + 1
            out_deg: dict[int, int] = {}
            inboxes: dict[int, list[Message]] = {i: [] for i in gens}
            for m in sends:
                out_deg[m.src] = out_deg.get(m.src, 0) + 1
                metrics.messages_total += 1
                metrics.max_message_bits = max(metrics.max_message_bits, m.bits)
                if metrics.trace is not None:
                    metrics.trace.append((round_no, m.src, m.dst, m.bits, m.tag))
                if m.dst in inboxes:
                    inboxes[m.dst].append(m)
            if out_deg:
                metrics.per_round_out_degree[round_no] = dict(
                    sorted(out_deg.items())
                )
                metrics.max_out_degree = max(
                    metrics.max_out_degree, max(out_deg.values())
                )
            for i in inboxes:
                inboxes[i].sort(key=lambda m: m.src)
            feed = {i: inboxes.get(i, []) for i in gens}
            metrics.rounds_total += 1
        if metrics.rounds_total > config.max_rounds:
            metrics.violations.append(f"nontermination:{metrics.rounds_total}")
            raise NonTermination(
                f"protocol exceeded {config.max_rounds} rounds"
            )

    return outputs, metrics


def _run_collective(kind, yields, gens, config, metrics) -> dict[int, Any]:
    n = config.n
    if kind is SortRequest:
        metrics.primitive_invocations["sort"] += 1
        if len(yields) != n:
            raise ProtocolError("sort requires every node to participate")
        merged: list[Point] = []
        for i, req in yields.items():
            if len(req.points) != n:
                raise PreconditionError(
                    f"node {i} contributed {len(req.points)} points to sort, "
                    f"expected {n}"
                )
            merged.extend(req.points)
        merged.sort()
        for k in range(1, len(merged)):
            if merged[k] == merged[k - 1]:
                raise DuplicatePoint(f"repeated point {merged[k]}")
        return {
            i: merged[(i - 1) * n : i * n] for i in range(1, n + 1)
        }
    if kind is RouteRequest:
        metrics.primitive_invocations["route"] += 1
        delivered: dict[int, list[tuple[int, str, tuple]]] = {i: [] for i in gens}
        sink_load: dict[int, int] = {}
        for i, req in yields.items():
            if len(req.records) > n:
                raise InfeasibleRouting(
                    f"node {i} is source of {len(req.records)} records, cap {n}"
                )
            for dst, tag, fields in req.records:
                if not 1 <= dst <= n:
                    raise ProtocolError(f"route record to invalid node {dst}")
                if dst not in delivered:
                    raise ProtocolError(f"route record to halted node {dst}")
                bits = _field_bits(fields, config.coord_bits, f"route {i}->{dst}")
                if bits > config.msg_bit_budget:
                    metrics.violations.append(f"budget:route:{i}->{dst}:{tag}:{bits}")
                    raise BudgetViolation(
                        f"routed record {tag} needs {bits} bits, "
                        f"budget {config.msg_bit_budget}"
                    )
                metrics.max_message_bits = max(metrics.max_message_bits, bits)
                sink_load[dst] = sink_load.get(dst, 0) + 1
                if sink_load[dst] > n:
                    raise InfeasibleRouting(
                        f"node {dst} is destination of more than {n} records"
                    )
                delivered[dst].append((i, tag, fields))
        for i in delivered:
            delivered[i].sort(key=lambda r: (r[0], r[1], _atoms(r[2])))
        return delivered
    raise ProtocolError(f"unknown collective {kind!r}")


def _check_congestion(sends: list[Message]) -> None:
    seen: set[tuple[int, int]] = set()
    for m in sends:
        pair = (m.src, m.dst)
        if pair in seen:
            raise CongestionViolation(
                f"two messages from {m.src} to {m.dst} in one round"
            )
        seen.add(pair)
