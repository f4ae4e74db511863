"""Round-synchronous message-passing engine.

A run proceeds in lock-step rounds.  In round ``r`` every live node receives
the messages sent to it in round ``r - 1`` and produces its own outbox.
Messages are bit strings (``str`` of ``'0'``/``'1'``); an empty string means
nothing was sent.  Ports index neighbours in ascending id order.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Generator, Iterable, Mapping, NamedTuple, Sequence

from .graphs import Graph, complete_graph

__all__ = [
    "ModelKind",
    "SimModel",
    "NodeContext",
    "NodeProgram",
    "GeneratorProgram",
    "Step",
    "RoundMetrics",
    "TraceRecord",
    "ExecutionResult",
    "SimulationError",
    "BandwidthViolation",
    "BroadcastViolation",
    "NonTermination",
    "run",
    "replay_check",
    "log2_ceil",
    "id_bits",
    "count_bits",
    "encode_uint",
    "decode_uint",
]


class ModelKind(str, Enum):
    CONGEST = "congest"
    BROADCAST_CONGEST = "broadcast"
    CONGESTED_CLIQUE = "clique"


def log2_ceil(x: int) -> int:
    return max(1, math.ceil(math.log2(max(x, 2))))


def id_bits(n_upper_bound: int) -> int:
    """Wire width of a node identifier in ``0..N-1``."""
    return log2_ceil(n_upper_bound)


def count_bits(n_upper_bound: int) -> int:
    """Wire width of a count in ``0..N``."""
    return max(1, int(n_upper_bound).bit_length())


def encode_uint(value: int, width: int) -> str:
    if value < 0 or value >= 1 << width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def decode_uint(bits: str) -> int:
    return int(bits, 2) if bits else 0


@dataclass(frozen=True)
class SimModel:
    kind: ModelKind
    bandwidth_bits: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.bandwidth_bits < 1:
            raise ValueError("bandwidth_bits must be at least 1")

    @classmethod
    def for_graph(cls, kind: ModelKind | str, n: int, words: int = 1) -> "SimModel":
        """Model with ``b(n) = words * ceil(log2 n)``."""
        return cls(ModelKind(kind), words * log2_ceil(n))


@dataclass
class NodeContext:
    node_id: int
    neighbor_ids: tuple[int, ...]
    local_input: Any
    n_upper_bound: int
    input_neighbor_ids: tuple[int, ...] = ()
    seed: int = 0
    bandwidth_bits: int = 1
    rng: random.Random = field(default_factory=random.Random, repr=False)

    def __post_init__(self) -> None:
        self._port = {w: i for i, w in enumerate(self.neighbor_ids)}

    @property
    def degree(self) -> int:
        return len(self.neighbor_ids)

    def port_of(self, neighbor: int) -> int:
        return self._port[neighbor]

    @property
    def id_bits(self) -> int:
        return id_bits(self.n_upper_bound)


class Step(NamedTuple):
    state: Any
    outbox: Any
    output: Any
    halted: bool


class NodeProgram:
    """Behaviour contract shared by every algorithm.

    ``init(ctx)`` builds the node state; ``on_round(state, inbox)`` maps the
    inbox (``{port: bits}``) to a :class:`Step`.  The outbox is either a bit
    string (sent on every port), a ``{port: bits}`` dict, or ``None``.
    """

    #: bandwidth the program expects, in multiples of ceil(log2 n)
    message_words: int = 1

    def init(self, ctx: NodeContext) -> Any:
        raise NotImplementedError

    def on_round(self, state: Any, inbox: Mapping[int, str]) -> Step:
        raise NotImplementedError

    def model_for(self, kind: ModelKind | str, n: int) -> SimModel:
        return SimModel.for_graph(kind, n, self.message_words)


NodeGen = Generator[Any, dict, Any]


class _GenState:
    __slots__ = ("gen", "started")

    def __init__(self, gen: NodeGen) -> None:
        self.gen = gen
        self.started = False


class GeneratorProgram(NodeProgram):
    """Node program written as a generator.

    ``body(ctx)`` yields the outbox of each round and receives the next
    inbox: ``inbox = yield outbox``.  Returning ends the node; the return
    value is its output.
    """

    def body(self, ctx: NodeContext) -> NodeGen:
        raise NotImplementedError

    def init(self, ctx: NodeContext) -> _GenState:
        return _GenState(self.body(ctx))

    def on_round(self, state: _GenState, inbox: Mapping[int, str]) -> Step:
        try:
            if not state.started:
                state.started = True
                outbox = next(state.gen)
            else:
                outbox = state.gen.send(dict(inbox))
        except StopIteration as stop:
            return Step(state, None, stop.value, True)
        return Step(state, outbox, None, False)


class SimulationError(RuntimeError):
    def __init__(self, message: str, *, round_no: int | None = None, node: int | None = None):
        super().__init__(message)
        self.round_no = round_no
        self.node = node


class BandwidthViolation(SimulationError):
    pass


class BroadcastViolation(SimulationError):
    pass


class NonTermination(SimulationError):
    pass


@dataclass
class RoundMetrics:
    rounds: int = 0
    max_message_bits: int = 0
    total_bits: int = 0
    per_node_halt_round: dict[int, int] = field(default_factory=dict)

    def as_record(self) -> dict[str, Any]:
        return {
            "rounds": self.rounds,
            "max_message_bits": self.max_message_bits,
            "total_bits": self.total_bits,
            "per_node_halt_round": dict(sorted(self.per_node_halt_round.items())),
        }


class TraceRecord(NamedTuple):
    round_no: int
    node: int
    port: int
    bits: str

    def line(self) -> str:
        return f"{self.round_no} {self.node} {self.port} {self.bits}"


@dataclass
class ExecutionResult:
    outputs: dict[int, Any]
    metrics: RoundMetrics
    trace: list[TraceRecord] | None = None
    model: SimModel | None = None

    def trace_lines(self) -> list[str]:
        return [rec.line() for rec in self.trace or []]


def _node_rng(seed: int, node: int) -> random.Random:
    # string seeds are hashed with sha512, so the stream is stable across runs
    return random.Random(f"{seed}/{node}")


def _contexts(
    topology: Graph,
    model: SimModel,
    seed: int,
    local_inputs: Mapping[int, Any] | Sequence[Any] | Callable[[int], Any] | None,
    n_upper_bound: int | None,
) -> tuple[Graph, list[NodeContext]]:
    n = topology.node_count
    comm = complete_graph(n) if model.kind is ModelKind.CONGESTED_CLIQUE else topology
    bound = n if n_upper_bound is None else n_upper_bound
    if bound < n:
        raise ValueError("n_upper_bound must be at least the node count")
    ctxs = []
    for v in range(n):
        if local_inputs is None:
            li = None
        elif callable(local_inputs):
            li = local_inputs(v)
        elif isinstance(local_inputs, Mapping):
            li = local_inputs.get(v)
        else:
            li = local_inputs[v]
        ctxs.append(
            NodeContext(
                node_id=v,
                neighbor_ids=tuple(comm.sorted_neighbors(v)),
                local_input=li,
                n_upper_bound=bound,
                input_neighbor_ids=tuple(topology.sorted_neighbors(v)),
                seed=seed,
                bandwidth_bits=model.bandwidth_bits,
                rng=_node_rng(seed, v),
            )
        )
    return comm, ctxs


def _normalize_outbox(outbox: Any, degree: int, model: SimModel, node: int, r: int) -> dict[int, str]:
    if outbox is None:
        return {}
    if isinstance(outbox, str):
        msgs = {p: outbox for p in range(degree)} if outbox else {}
    else:
        msgs = {int(p): m for p, m in outbox.items() if m}
    for p, m in msgs.items():
        if not 0 <= p < degree:
            raise SimulationError(f"node {node} used invalid port {p}", round_no=r, node=node)
        if m.strip("01"):
            raise SimulationError(f"node {node} sent a non-binary message", round_no=r, node=node)
        if len(m) > model.bandwidth_bits:
            raise BandwidthViolation(
                f"node {node} sent {len(m)} bits on port {p} in round {r}, "
                f"bandwidth is {model.bandwidth_bits}",
                round_no=r,
                node=node,
            )
    if model.kind is ModelKind.BROADCAST_CONGEST and msgs:
        if len(msgs) != degree or len(set(msgs.values())) != 1:
            raise BroadcastViolation(
                f"node {node} sent differing messages in round {r}", round_no=r, node=node
            )
    return msgs


def run(
    topology: Graph,
    program: NodeProgram,
    model: SimModel | None = None,
    seed: int = 0,
    max_rounds: int = 100_000,
    *,
    local_inputs: Mapping[int, Any] | Sequence[Any] | Callable[[int], Any] | None = None,
    n_upper_bound: int | None = None,
    trace: bool = False,
) -> ExecutionResult:
    """Execute ``program`` on every node of ``topology`` until all halt."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    if model is None:
        model = program.model_for(ModelKind.CONGEST, topology.node_count)
    comm, ctxs = _contexts(topology, model, seed, local_inputs, n_upper_bound)
    n = comm.node_count
    # reverse ports: back_port[v][p] = port of v at its p-th neighbour
    back_port = [
        [ctxs[w].port_of(v) for w in ctxs[v].neighbor_ids] for v in range(n)
    ]
    states = [program.init(ctx) for ctx in ctxs]
    live = set(range(n))
    inboxes: list[dict[int, str]] = [{} for _ in range(n)]
    outputs: dict[int, Any] = {}
    metrics = RoundMetrics()
    log: list[TraceRecord] | None = [] if trace else None
    r = 0
    while live:
        if r >= max_rounds:
            metrics.rounds = r
            err = NonTermination(
                f"{len(live)} node(s) still running after {max_rounds} rounds", round_no=r
            )
            err.partial = ExecutionResult(outputs, metrics, log, model)  # type: ignore[attr-defined]
            raise err
        r += 1
        nxt: list[dict[int, str]] = [{} for _ in range(n)]
        for v in sorted(live):
            step = program.on_round(states[v], inboxes[v])
            states[v] = step.state
            if step.output is not None:
                outputs[v] = step.output
            msgs = _normalize_outbox(step.outbox, len(ctxs[v].neighbor_ids), model, v, r)
            for p, m in sorted(msgs.items()):
                w = ctxs[v].neighbor_ids[p]
                nxt[w][back_port[v][p]] = m
                bits = len(m)
                metrics.total_bits += bits
                if bits > metrics.max_message_bits:
                    metrics.max_message_bits = bits
                if log is not None:
                    log.append(TraceRecord(r, v, p, m))
            if step.halted:
                live.discard(v)
                metrics.per_node_halt_round[v] = r
        inboxes = nxt
    metrics.rounds = r
    return ExecutionResult(outputs, metrics, log, model)


def replay_check(
    topology: Graph,
    program: NodeProgram,
    model: SimModel,
    result: ExecutionResult,
    seed: int = 0,
    *,
    local_inputs: Mapping[int, Any] | Sequence[Any] | Callable[[int], Any] | None = None,
    n_upper_bound: int | None = None,
) -> bool:
    """Re-run every node in isolation, feeding it the inbox recorded in the
    trace, and confirm it reproduces exactly its recorded sends and output."""
    if result.trace is None:
        raise ValueError("replay needs a traced execution")
    comm, ctxs = _contexts(topology, model, seed, local_inputs, n_upper_bound)
    sent: dict[tuple[int, int], dict[int, str]] = {}
    received: dict[tuple[int, int], dict[int, str]] = {}
    for rec in result.trace:
        sent.setdefault((rec.round_no, rec.node), {})[rec.port] = rec.bits
        w = ctxs[rec.node].neighbor_ids[rec.port]
        received.setdefault((rec.round_no + 1, w), {})[ctxs[w].port_of(rec.node)] = rec.bits
    for v in range(comm.node_count):
        state = program.init(ctxs[v])
        halt_round = result.metrics.per_node_halt_round.get(v)
        output = None
        for r in range(1, (halt_round or result.metrics.rounds) + 1):
            step = program.on_round(state, received.get((r, v), {}))
            state = step.state
            if step.output is not None:
                output = step.output
            msgs = _normalize_outbox(step.outbox, len(ctxs[v].neighbor_ids), model, v, r)
            if msgs != sent.get((r, v), {}):
                return False
            if step.halted:
                if r != halt_round:
                    return False
                break
        if output != result.outputs.get(v):
            return False
    return True


def iter_ports(ctx: NodeContext, ids: Iterable[int]) -> list[int]:
    return [ctx.port_of(w) for w in ids]
