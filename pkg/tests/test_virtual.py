from congestlab.graphs import complete_graph, cycle_graph, path_graph
from congestlab.sim import GeneratorProgram, SimModel, decode_uint, encode_uint, run
from congestlab.virtual import BlowupWiring, IdentityWiring, run_virtual, virtual_topology


class EchoIds(GeneratorProgram):
    def body(self, ctx):
        inbox = yield encode_uint(ctx.node_id, ctx.id_bits)
        return sorted(decode_uint(m) for m in inbox.values())


def test_identity_wiring_matches_direct_run():
    g = cycle_graph(6)
    model = SimModel.for_graph("congest", 6)
    direct = run(g, EchoIds(), model)
    virt = run_virtual(g, 1, EchoIds(), IdentityWiring(), model)
    assert virt.outputs == direct.outputs
    assert virt.virtual_rounds == direct.metrics.rounds
    assert virt.host_rounds == direct.metrics.rounds
    assert virt.result.metrics.total_bits == direct.metrics.total_bits


def test_blowup_topology_on_k2():
    topo = virtual_topology(complete_graph(2), BlowupWiring(3))
    assert topo.node_count == 6 and topo.m == 9
    topo = virtual_topology(complete_graph(2), BlowupWiring(3, "independent-set"))
    assert topo.m == 9 + 2 * 3


def test_blowup_simulation_matches_virtual_topology():
    host = path_graph(3)
    wiring = BlowupWiring(2)
    topo = virtual_topology(host, wiring)
    model = SimModel.for_graph("congest", 6, 2)
    virt = run_virtual(host, 2, EchoIds(), wiring, model)
    direct = run(topo, EchoIds(), SimModel.for_graph("congest", 6))
    assert virt.outputs == direct.outputs
    assert virt.overhead <= 2 * 2
