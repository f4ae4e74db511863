"""Running a program on a virtual graph whose nodes are simulated by hosts.

Every host node owns up to ``expansion`` virtual nodes.  One virtual round is
carried out in ``expansion ** 2`` host rounds: each ordered pair of local
indices ``(i, j)`` gets its own slot on each host edge, so a host edge never
carries more than one virtual message per host round.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from .graphs import Graph
from .sim import (
    ExecutionResult,
    ModelKind,
    NodeContext,
    NodeProgram,
    SimModel,
    SimulationError,
    Step,
    _node_rng,
    run,
)

__all__ = [
    "VirtualNode",
    "Wiring",
    "IdentityWiring",
    "BlowupWiring",
    "WiringError",
    "VirtualHostProgram",
    "VirtualRun",
    "simulate_virtual_nodes",
    "run_virtual",
    "virtual_topology",
]


class WiringError(SimulationError):
    pass


@dataclass(frozen=True)
class VirtualNode:
    """``neighbors`` are the virtual node's communication partners; in a
    simulated congested clique ``input_neighbors`` holds its actual edges."""

    vid: int
    neighbors: tuple[int, ...]
    local_input: Any = None
    input_neighbors: tuple[int, ...] | None = None


class Wiring:
    """Rule mapping a host's local view to the virtual nodes it simulates.

    ``hosted`` and ``owner`` must be computable by every host from global
    knowledge; ``virtual_nodes`` may only look at the host's own context.
    """

    expansion: int = 1

    def virtual_count(self, host_n: int) -> int:
        raise NotImplementedError

    def hosted(self, host: int, host_n: int) -> list[int]:
        raise NotImplementedError

    def owner(self, vid: int, host_n: int) -> int:
        raise NotImplementedError

    def virtual_nodes(self, ctx: NodeContext, host_n: int) -> list[VirtualNode]:
        raise NotImplementedError


class IdentityWiring(Wiring):
    expansion = 1

    def virtual_count(self, host_n: int) -> int:
        return host_n

    def hosted(self, host: int, host_n: int) -> list[int]:
        return [host]

    def owner(self, vid: int, host_n: int) -> int:
        return vid

    def virtual_nodes(self, ctx: NodeContext, host_n: int) -> list[VirtualNode]:
        return [VirtualNode(ctx.node_id, tuple(ctx.input_neighbor_ids), ctx.local_input)]


class BlowupWiring(Wiring):
    """Host ``v`` simulates ``v_1..v_k`` (virtual id ``v*k + i - 1``, color ``i``).

    Copies of one host are independent (``target="clique"``) or form a clique
    (``target="independent-set"``); ``v_i ~ u_j`` for all ``i, j`` whenever
    ``uv`` is an edge.  The virtual local input is the copy's color.
    """

    def __init__(self, k: int, target: str = "clique") -> None:
        if k < 1:
            raise ValueError("k must be positive")
        if target not in ("clique", "independent-set"):
            raise ValueError(f"unknown target {target!r}")
        self.expansion = k
        self.k = k
        self.target = target

    def virtual_count(self, host_n: int) -> int:
        return self.k * host_n

    def hosted(self, host: int, host_n: int) -> list[int]:
        return [host * self.k + i for i in range(self.k)]

    def owner(self, vid: int, host_n: int) -> int:
        return vid // self.k

    def virtual_nodes(self, ctx: NodeContext, host_n: int) -> list[VirtualNode]:
        out = []
        v = ctx.node_id
        for i in range(self.k):
            nbrs = {u * self.k + j for u in ctx.input_neighbor_ids for j in range(self.k)}
            if self.target == "independent-set":
                nbrs |= {v * self.k + j for j in range(self.k) if j != i}
            out.append(VirtualNode(v * self.k + i, tuple(sorted(nbrs)), i + 1))
        return out


@dataclass
class _VState:
    ctxs: dict[int, NodeContext]
    states: dict[int, Any]
    live: set[int]
    outputs: dict[int, Any]
    inbox_next: dict[int, dict[int, str]]
    queue: dict[int, dict[int, str]]  # host port -> slot -> bits
    round_no: int = 0
    virtual_rounds: int = 0


@dataclass(frozen=True)
class VirtualOutputs:
    outputs: dict[int, Any]
    virtual_rounds: int


class VirtualHostProgram(NodeProgram):
    def __init__(self, inner: NodeProgram, wiring: Wiring, host_n: int,
                 virtual_bound: int | None = None) -> None:
        self.inner = inner
        self.wiring = wiring
        self.host_n = host_n
        self.slots = wiring.expansion ** 2
        self.virtual_bound = virtual_bound or wiring.virtual_count(host_n)
        self.message_words = inner.message_words

    def model_for(self, kind: ModelKind | str, n: int) -> SimModel:
        # identifiers on the wire are virtual ids
        return self.inner.model_for(kind, self.wiring.virtual_count(n))

    def init(self, ctx: NodeContext) -> _VState:
        nodes = self.wiring.virtual_nodes(ctx, self.host_n)
        expected = self.wiring.hosted(ctx.node_id, self.host_n)
        if [vn.vid for vn in nodes] != expected:
            raise WiringError(f"host {ctx.node_id}: wiring hosted() disagrees with virtual_nodes()")
        if len(nodes) > self.wiring.expansion:
            raise WiringError(f"host {ctx.node_id} simulates more than {self.wiring.expansion} nodes")
        ctxs = {}
        for vn in nodes:
            for w in vn.neighbors:
                host = self.wiring.owner(w, self.host_n)
                if host != ctx.node_id and host not in ctx.neighbor_ids:
                    raise WiringError(
                        f"virtual edge {vn.vid}-{w} needs host link {ctx.node_id}-{host}"
                    )
            ctxs[vn.vid] = NodeContext(
                node_id=vn.vid,
                neighbor_ids=vn.neighbors,
                local_input=vn.local_input,
                n_upper_bound=self.virtual_bound,
                input_neighbor_ids=(
                    vn.neighbors if vn.input_neighbors is None else vn.input_neighbors
                ),
                seed=ctx.seed,
                bandwidth_bits=ctx.bandwidth_bits,
                rng=_node_rng(ctx.seed, vn.vid),
            )
        state = _VState(
            ctxs=ctxs,
            states={vid: self.inner.init(c) for vid, c in ctxs.items()},
            live=set(ctxs),
            outputs={},
            inbox_next={vid: {} for vid in ctxs},
            queue={},
        )
        state.host_ctx = ctx  # type: ignore[attr-defined]
        return state

    def on_round(self, st: _VState, inbox) -> Step:
        ctx: NodeContext = st.host_ctx  # type: ignore[attr-defined]
        st.round_no += 1
        phase = (st.round_no - 1) % self.slots
        k = self.wiring.expansion
        mine = self.wiring.hosted(ctx.node_id, self.host_n)
        if st.round_no > 1:
            slot = (phase - 1) % self.slots
            i, j = divmod(slot, k)
            for port, bits in inbox.items():
                sender = ctx.neighbor_ids[port]
                src = self.wiring.hosted(sender, self.host_n)[i]
                dst = mine[j]
                st.inbox_next[dst][st.ctxs[dst].port_of(src)] = bits
        if phase == 0:
            if not st.live:
                return Step(st, None, VirtualOutputs(dict(st.outputs), st.virtual_rounds), True)
            st.virtual_rounds += 1
            current = st.inbox_next
            st.inbox_next = {vid: {} for vid in st.ctxs}
            st.queue = {}
            local_index = {vid: idx for idx, vid in enumerate(mine)}
            for vid in sorted(st.live):
                vctx = st.ctxs[vid]
                step = self.inner.on_round(st.states[vid], current[vid])
                st.states[vid] = step.state
                if step.output is not None:
                    st.outputs[vid] = step.output
                out = step.outbox
                if isinstance(out, str):
                    out = {p: out for p in range(len(vctx.neighbor_ids))} if out else {}
                for p, bits in (out or {}).items():
                    if not bits:
                        continue
                    dst = vctx.neighbor_ids[p]
                    host = self.wiring.owner(dst, self.host_n)
                    if host == ctx.node_id:
                        st.inbox_next[dst][st.ctxs[dst].port_of(vid)] = bits
                    else:
                        dst_index = self.wiring.hosted(host, self.host_n).index(dst)
                        slot = local_index[vid] * k + dst_index
                        st.queue.setdefault(ctx.port_of(host), {})[slot] = bits
                if step.halted:
                    st.live.discard(vid)
        out = {}
        for port, slots in st.queue.items():
            bits = slots.get(phase)
            if bits:
                out[port] = bits
        if phase == self.slots - 1 and not st.live:
            return Step(st, out, VirtualOutputs(dict(st.outputs), st.virtual_rounds), True)
        return Step(st, out, None, False)


def simulate_virtual_nodes(host: Graph, expansion: int, virtual_program: NodeProgram,
                           wiring: Wiring) -> VirtualHostProgram:
    if wiring.expansion != expansion:
        raise WiringError(f"wiring expansion {wiring.expansion} != {expansion}")
    return VirtualHostProgram(virtual_program, wiring, host.node_count)


def virtual_topology(host: Graph, wiring: Wiring, model: ModelKind | str = ModelKind.CONGEST) -> Graph:
    """Assemble the virtual graph from every host's local wiring view."""
    kind = ModelKind(model)
    from .graphs import complete_graph

    comm = complete_graph(host.node_count) if kind is ModelKind.CONGESTED_CLIQUE else host
    edges = set()
    for v in host.nodes():
        ctx = NodeContext(v, tuple(comm.sorted_neighbors(v)), None, host.node_count,
                          tuple(host.sorted_neighbors(v)))
        for vn in wiring.virtual_nodes(ctx, host.node_count):
            for w in (vn.neighbors if vn.input_neighbors is None else vn.input_neighbors):
                edges.add((min(vn.vid, w), max(vn.vid, w)))
    return Graph.from_edges(wiring.virtual_count(host.node_count), edges)


@dataclass
class VirtualRun:
    outputs: dict[int, Any]
    host_rounds: int
    virtual_rounds: int
    result: ExecutionResult

    @property
    def overhead(self) -> float:
        return self.host_rounds / max(self.virtual_rounds, 1)


def run_virtual(
    host: Graph,
    expansion: int,
    virtual_program: NodeProgram,
    wiring: Wiring,
    model: SimModel,
    seed: int = 0,
    max_rounds: int = 1_000_000,
    local_inputs: Sequence[Any] | dict | None = None,
) -> VirtualRun:
    program = simulate_virtual_nodes(host, expansion, virtual_program, wiring)
    res = run(host, program, model, seed, max_rounds, local_inputs=local_inputs)
    merged: dict[int, Any] = {}
    vrounds = 0
    for out in res.outputs.values():
        merged.update(out.outputs)
        vrounds = max(vrounds, out.virtual_rounds)
    if res.metrics.rounds > vrounds * program.slots:
        raise SimulationError("virtual simulation exceeded its overhead budget")
    return VirtualRun(merged, res.metrics.rounds, vrounds, res)
