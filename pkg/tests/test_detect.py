import math
import random

import pytest

from congestlab.detect import (
    assemble_orientation,
    build_coloring_family,
    induced_p2_program,
    induced_tree_derandomized,
    induced_tree_random,
    label_tree_bottom_up,
    orientation_program,
    phase_bound,
    proper_copy_oracle,
    proper_induced_tree_program,
    trial_count,
    verdict,
)
from congestlab.detect.orientation import OrientationAssignment
from congestlab.detect.proper import NotATree, exchange_width
from congestlab.graphs import (
    Graph,
    complete_graph,
    cycle_graph,
    disjoint_union,
    gnp_graph,
    path_graph,
    random_degenerate_graph,
    star_graph,
)
from congestlab.oracles import oracle_subgraph
from congestlab.sim import SimModel, run

from conftest import atlas


def orient(g, d, eps):
    res = run(g, orientation_program(d, eps))
    return assemble_orientation(g, res.outputs), res


# orientation


def test_orientation_on_path():
    sigma, _ = orient(path_graph(6), 1, 1.0)
    assert sigma.max_out_degree() <= 3 and sigma.is_acyclic() and sigma.orients(path_graph(6))


def test_orientation_on_k4():
    sigma, _ = orient(complete_graph(4), 3, 1.0)
    assert sigma.is_acyclic() and sigma.max_out_degree() == 3


def test_orientation_single_phase_on_cycle():
    sigma, _ = orient(cycle_graph(8), 2, 0.5)
    assert set(sigma.layer) == {1}
    assert sigma.arcs() == sorted((v, u) for v in range(8) for u in cycle_graph(8).neighbors(v) if u > v)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_orientation_contract_random(d):
    rng = random.Random(d)
    eps = 1.0
    for _ in range(15):
        g = random_degenerate_graph(rng.randint(5, 60), d, rng)
        sigma, _ = orient(g, d, eps)
        assert sigma.is_valid(g)
        assert sigma.max_out_degree() <= math.floor((2 + eps) * d)
        assert sigma.phases() <= phase_bound(g.node_count, eps)


def test_orientation_unknown_degeneracy():
    rng = random.Random(3)
    for d in (1, 2, 3):
        g = random_degenerate_graph(50, d, rng)
        sigma, _ = orient(g, None, 1.0)
        assert sigma.is_acyclic() and sigma.orients(g)
        assert sigma.max_out_degree() <= (4 + 1.0) * d


def test_orientation_wrong_degeneracy_is_detected():
    from congestlab.sim import NonTermination

    with pytest.raises(NonTermination):
        run(complete_graph(8), orientation_program(1, 0.5))


# labelled trees and proper copies


def test_labels():
    assert label_tree_bottom_up(Graph.from_edges(1, [])).label == (1,)
    t = label_tree_bottom_up(path_graph(3), root=2)
    assert t.label == (1, 2, 3)
    star = label_tree_bottom_up(star_graph(3), root=0)
    assert star.label[0] == 4 and sorted(star.label[1:]) == [1, 2, 3]
    with pytest.raises(NotATree):
        label_tree_bottom_up(cycle_graph(3))


def test_proper_oracle_examples():
    g = path_graph(3)
    t = label_tree_bottom_up(path_graph(3), root=2)
    sigma = OrientationAssignment.from_layers(g, (1, 2, 3))
    assert proper_copy_oracle(g, t, sigma, [1, 2, 3])
    assert not proper_copy_oracle(g, t, sigma, [1, 0, 3])
    k3 = complete_graph(3)
    for layers in [(1, 2, 3), (3, 2, 1), (1, 1, 1)]:
        assert not proper_copy_oracle(k3, t, OrientationAssignment.from_layers(k3, layers), [1, 2, 3])


def _proper_run(g, t, sigma, chi):
    res = run(g, proper_induced_tree_program(t), SimModel("congest", exchange_width(t.k)),
              local_inputs=[(chi[v], sigma.out[v]) for v in g.nodes()], trace=True)
    return res


def test_proper_program_matches_oracle():
    rng = random.Random(21)
    trees = [path_graph(2), path_graph(3), star_graph(3), path_graph(4)]
    for _ in range(400):
        g = gnp_graph(rng.randint(2, 9), rng.random(), rng)
        t = label_tree_bottom_up(rng.choice(trees), 0)
        layers = [rng.randint(1, 3) for _ in g.nodes()]
        sigma = OrientationAssignment.from_layers(g, layers)
        chi = [rng.randint(0, t.k) for _ in g.nodes()]
        res = _proper_run(g, t, sigma, chi)
        assert verdict(res.outputs) == proper_copy_oracle(g, t, sigma, chi)
        k = t.k
        assert res.metrics.rounds <= k + 2 * math.ceil(math.log2(k + 2))
        width = exchange_width(k)
        assert all(len(rec.bits) == 1 for rec in res.trace if rec.round_no > width)


def test_chord_blocks_report():
    # copy of P3 labelled 1-2-3 plus a chord 1-3
    g = complete_graph(3)
    t = label_tree_bottom_up(path_graph(3), root=2)
    sigma = OrientationAssignment.from_layers(g, (1, 2, 3))
    assert not verdict(_proper_run(g, t, sigma, [1, 2, 3]).outputs)


# induced P3 (2-edge path)


def test_p2_examples():
    prog = induced_p2_program()
    for g, want in [(path_graph(3), True), (disjoint_union(complete_graph(3), complete_graph(3)), False),
                    (Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]), True)]:
        res = run(g, prog, prog.model_for("broadcast", g.node_count))
        assert verdict(res.outputs) == want and res.metrics.rounds == 3


def test_p2_small_atlas():
    prog = induced_p2_program()
    for g in atlas(5):
        res = run(g, prog, prog.model_for("broadcast", g.node_count))
        assert verdict(res.outputs) == (oracle_subgraph(g, path_graph(3), True) is not None)


# randomized and derandomized detection


def test_trial_count_formula():
    assert trial_count(5, 2, 1 - math.exp(-1)) == 4096
    with pytest.raises(ValueError):
        trial_count(5, 2, 1.0)


def test_random_detection_finds_an_edge():
    rng = random.Random(2)
    g = random_degenerate_graph(10, 1, rng)
    hits = sum(verdict(run(g, induced_tree_random(path_graph(2), 1, 0.99), seed=s).outputs) for s in range(5))
    assert hits == 5


def test_random_detection_has_one_sided_error():
    # disjoint edges have no induced 2-edge path, whatever the coin flips
    g = disjoint_union(*[complete_graph(2)] * 4)
    for seed in range(5):
        res = run(g, induced_tree_random(path_graph(3), 1, 0.99, alpha=1), seed=seed)
        assert not verdict(res.outputs)


def test_derandomized_detection():
    p3 = path_graph(3)
    host = disjoint_union(path_graph(3), complete_graph(2), path_graph(1), path_graph(1),
                          complete_graph(2), path_graph(1), path_graph(1), path_graph(1))
    assert host.node_count == 12
    prog = induced_tree_derandomized(p3, 1, 12)
    assert verdict(run(host, prog).outputs)
    no = disjoint_union(*[complete_graph(2)] * 6)
    assert not verdict(run(no, prog).outputs)


def test_coloring_family_small_exhaustive():
    fam = build_coloring_family(6, 1, 1)
    assert fam.verify_exhaustive() == []


def test_coloring_family_sampled_triples():
    fam = build_coloring_family(10, 2, 2)
    rng = random.Random(0)
    for _ in range(200):
        nodes = rng.sample(range(10), 2 + fam.avoid_size)
        s, t = nodes[:2], nodes[2:]
        b = rng.sample([1, 2], 2)
        assert fam.covers(s, b, t)
