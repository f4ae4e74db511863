import pytest

from congestlab.graphs import complete_graph, cycle_graph, path_graph, star_graph
from congestlab.sim import (
    BandwidthViolation,
    BroadcastViolation,
    GeneratorProgram,
    ModelKind,
    NodeProgram,
    NonTermination,
    SimModel,
    SimulationError,
    Step,
    count_bits,
    decode_uint,
    encode_uint,
    id_bits,
    replay_check,
    run,
)


class HaltNow(NodeProgram):
    def init(self, ctx):
        return None

    def on_round(self, state, inbox):
        return Step(state, None, "done", True)


class SendBits(GeneratorProgram):
    def __init__(self, width):
        self.width = width

    def body(self, ctx):
        yield "1" * self.width
        return None


class PerPort(GeneratorProgram):
    def body(self, ctx):
        inbox = yield {p: format(p % 2, "b") for p in range(ctx.degree)}
        return sorted(inbox.values())


class Forever(GeneratorProgram):
    def body(self, ctx):
        while True:
            yield None


class EchoIds(GeneratorProgram):
    def body(self, ctx):
        inbox = yield encode_uint(ctx.node_id, ctx.id_bits)
        return sorted(decode_uint(m) for m in inbox.values())


class RandomBit(GeneratorProgram):
    def body(self, ctx):
        inbox = yield str(ctx.rng.randint(0, 1))
        return (ctx.rng.random(), tuple(sorted(inbox.items())))


def test_immediate_halt_is_one_round():
    res = run(cycle_graph(5), HaltNow())
    assert res.metrics.rounds == 1 and res.metrics.total_bits == 0
    assert res.outputs == {v: "done" for v in range(5)}


def test_bandwidth_violation():
    g = path_graph(4)
    model = SimModel.for_graph("congest", 4)
    run(g, SendBits(model.bandwidth_bits), model)
    with pytest.raises(BandwidthViolation):
        run(g, SendBits(model.bandwidth_bits + 1), model)


def test_broadcast_model_rejects_differing_messages():
    g = star_graph(3)
    with pytest.raises(BroadcastViolation):
        run(g, PerPort(), SimModel("broadcast", 4))
    # the same program is fine point to point
    res = run(g, PerPort(), SimModel("congest", 4))
    assert res.outputs[0] == ["0", "0", "0"]


def test_nontermination_keeps_partial_metrics():
    with pytest.raises(NonTermination) as info:
        run(path_graph(3), Forever(), max_rounds=7)
    assert info.value.partial.metrics.rounds == 7


def test_messages_arrive_next_round_and_bits_are_counted():
    g = cycle_graph(6)
    res = run(g, EchoIds())
    for v in g.nodes():
        assert res.outputs[v] == sorted(g.neighbors(v))
    assert res.metrics.total_bits == 2 * g.m * id_bits(6)
    assert res.metrics.max_message_bits == id_bits(6)
    assert res.metrics.rounds == 2


def test_congested_clique_connects_everyone():
    g = path_graph(4)
    res = run(g, EchoIds(), SimModel("clique", 2))
    assert res.outputs[0] == [1, 2, 3]


def test_seeded_runs_are_reproducible():
    g = complete_graph(5)
    a = run(g, RandomBit(), seed=11, trace=True)
    b = run(g, RandomBit(), seed=11, trace=True)
    c = run(g, RandomBit(), seed=12)
    assert a.outputs == b.outputs and a.trace_lines() == b.trace_lines()
    assert a.outputs != c.outputs


def test_replay_check_accepts_real_trace_and_rejects_tampering():
    g = cycle_graph(5)
    model = SimModel.for_graph("congest", 5)
    res = run(g, EchoIds(), model, trace=True)
    assert replay_check(g, EchoIds(), model, res)
    first = res.trace[0]
    flipped = ("1" if first.bits[0] == "0" else "0") + first.bits[1:]
    res.trace[0] = first._replace(bits=flipped)
    assert not replay_check(g, EchoIds(), model, res)


def test_invalid_outboxes():
    class BadPort(GeneratorProgram):
        def body(self, ctx):
            yield {99: "1"}

    class NotBinary(GeneratorProgram):
        def body(self, ctx):
            yield "12"

    for prog in (BadPort(), NotBinary()):
        with pytest.raises(SimulationError):
            run(path_graph(2), prog)


def test_uint_helpers():
    assert encode_uint(5, 4) == "0101" and decode_uint("0101") == 5
    assert count_bits(8) == 4 and id_bits(8) == 3
    with pytest.raises(ValueError):
        encode_uint(16, 4)


def test_model_validation():
    with pytest.raises(ValueError):
        SimModel("congest", 0)
    with pytest.raises(ValueError):
        SimModel("smoke-signals", 3)
    assert SimModel.for_graph(ModelKind.CONGEST, 1000, 2).bandwidth_bits == 20
