import random

import pytest

from congestlab.graphs import (
    CliqueCover,
    Coloring,
    Graph,
    complete_graph,
    cycle_graph,
    gnp_graph,
    path_graph,
)
from congestlab.instances import all_inputs
from congestlab.lbgen import gen_clique_gadget_instance
from congestlab.oracles import oracle_multicolored, oracle_subgraph
from congestlab.reductions import (
    InvalidCover,
    complement_instance,
    lift_lower_bound_family,
    multicolored_blowup,
    reduce_clique_to_pattern,
    reduction_verdict,
    simulate_reduction_cc,
    strip_same_color_edges,
)
from congestlab.sim import run
from congestlab.structure import complement

K4_PENDANT = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)])


def has_clique(g, s):
    return oracle_subgraph(g, complete_graph(s), False, override_scale=True) is not None


def test_triangle_to_triangle():
    red = reduce_clique_to_pattern(complete_graph(3), complete_graph(3), 3, CliqueCover(3, ((0, 1, 2),)))
    assert oracle_subgraph(red.graph, complete_graph(3), True) is not None


def test_node_count_with_pendant():
    red = reduce_clique_to_pattern(cycle_graph(5), K4_PENDANT, 4)
    assert red.graph.node_count == 4 * 5 + 1
    assert red.rule_problems(cycle_graph(5)) == []


def test_complement_p5_equivalence():
    h = complement(path_graph(5))
    rng = random.Random(31)
    for _ in range(50):
        g = gnp_graph(6, 0.5, rng)
        red = reduce_clique_to_pattern(g, h, 3)
        want = has_clique(g, 3)
        assert (oracle_subgraph(red.graph, h, True, override_scale=True) is not None) == want
        assert (oracle_subgraph(red.graph, h, False, override_scale=True) is not None) == want


def test_invalid_covers():
    h = complement(path_graph(5))
    with pytest.raises(InvalidCover):
        reduce_clique_to_pattern(path_graph(3), h, 3, CliqueCover(3, ((0, 1),)))
    with pytest.raises(InvalidCover):
        reduce_clique_to_pattern(path_graph(3), path_graph(3), 3)


@pytest.mark.parametrize("g,want", [(complete_graph(3), True), (cycle_graph(5), False)])
def test_congested_clique_simulation(g, want):
    prog = simulate_reduction_cc(complete_graph(3), 3)
    res = run(g, prog, prog.model_for("clique", g.node_count))
    assert reduction_verdict(res.outputs) == want
    assert prog.overhead_bound == (3 + 1) ** 2


def test_congested_clique_random():
    rng = random.Random(4)
    h = K4_PENDANT
    prog = simulate_reduction_cc(h, 4)
    for _ in range(6):
        g = gnp_graph(6, 0.7, rng)
        res = run(g, prog, prog.model_for("clique", 6))
        assert reduction_verdict(res.outputs) == has_clique(g, 4)


def test_complement_instance():
    g2, h2 = complement_instance(cycle_graph(5), path_graph(5))
    assert oracle_subgraph(g2, h2, True) is None
    assert has_clique(complement(Graph.from_edges(3, [])), 3)
    assert complement(cycle_graph(5)).m == 5
    rng = random.Random(6)
    for _ in range(30):
        g, h = gnp_graph(7, 0.5, rng), gnp_graph(4, 0.5, rng)
        cg, ch = complement_instance(g, h)
        assert (oracle_subgraph(g, h, True) is None) == (oracle_subgraph(cg, ch, True) is None)


def test_lifted_gadget_family_keeps_flags_and_invariants():
    for disj in all_inputs(2, "flat"):
        base = gen_clique_gadget_instance(2, disj)
        assert base.structural_problems() == []
        assert has_clique(base.graph, 4) == disj.intersects()
        for h in (complete_graph(4), K4_PENDANT):
            lifted = lift_lower_bound_family(base, h)
            assert lifted.structural_problems() == []
            found = oracle_subgraph(lifted.graph, h, True, override_scale=True) is not None
            assert found == lifted.expected == disj.intersects()


def test_lifting_needs_clique_predicate():
    from congestlab.lbgen import gen_induced_even_cycle

    inst = gen_induced_even_cycle(2, 3, next(iter(all_inputs(2))))
    with pytest.raises(InvalidCover):
        lift_lower_bound_family(inst, K4_PENDANT)


def test_blowup():
    big, chi = multicolored_blowup(complete_graph(2), 2)
    assert big.node_count == 4
    assert oracle_multicolored(big, complete_graph(2), chi, False) is not None
    rng = random.Random(8)
    for _ in range(50):
        g = gnp_graph(6, 0.5, rng)
        big, chi = multicolored_blowup(g, 3)
        assert big.node_count == 18
        assert (oracle_multicolored(big, complete_graph(3), chi, False, override_scale=True) is not None) == has_clique(g, 3)
        big, chi = multicolored_blowup(g, 3, "independent-set")
        indep = oracle_subgraph(g, Graph.from_edges(3, []), True) is not None
        assert (oracle_multicolored(big, Graph.from_edges(3, []), chi, True, override_scale=True) is not None) == indep


def test_strip_same_color_edges():
    k3 = complete_graph(3)
    assert strip_same_color_edges(k3, Coloring((1, 2, 3))) == k3
    assert strip_same_color_edges(k3, Coloring((1, 1, 1))).m == 0
