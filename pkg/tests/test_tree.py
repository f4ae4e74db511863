import random

import networkx as nx
import pytest

from congestlab.graphs import cycle_graph, gnp_graph, path_graph, star_graph
from congestlab.sim import run
from congestlab.structure import vertex_cover_number
from congestlab.tree import bfs_tree_program

from conftest import to_nx


def test_bfs_on_cycle():
    res = run(cycle_graph(8), bfs_tree_program())
    depths = [res.outputs[v].depth for v in range(8)]
    assert depths == [0, 1, 2, 3, 4, 3, 2, 1]
    assert res.metrics.rounds <= 8 + 2


def test_bfs_star_and_path():
    out = run(star_graph(4), bfs_tree_program()).outputs
    assert all(out[v].depth == 1 for v in range(1, 5)) and out[0].children == (1, 2, 3, 4)
    out = run(path_graph(5), bfs_tree_program()).outputs
    assert [out[v].depth for v in range(5)] == [0, 1, 2, 3, 4]


def test_bfs_depths_match_shortest_paths():
    rng = random.Random(4)
    for _ in range(25):
        g = gnp_graph(12, 0.3, rng)
        if not g.is_connected():
            continue
        out = run(g, bfs_tree_program()).outputs
        dist = nx.single_source_shortest_path_length(to_nx(g), 0)
        for v in g.nodes():
            assert out[v].depth == dist[v]
            if v:
                assert out[v].parent in g.neighbors(v) and dist[out[v].parent] == dist[v] - 1


def test_small_cover_means_small_depth():
    rng = random.Random(8)
    for _ in range(40):
        g = gnp_graph(9, 0.35, rng)
        if not g.is_connected() or vertex_cover_number(g) != 2:
            continue
        out = run(g, bfs_tree_program()).outputs
        assert max(o.depth for o in out.values()) <= 4


@pytest.mark.parametrize("agg,expected", [("sum", 21), ("count", 7), ("max", 6)])
def test_aggregation(agg, expected):
    g = path_graph(7)
    res = run(g, bfs_tree_program(aggregate=agg), local_inputs=list(range(7)))
    assert {o.total for o in res.outputs.values()} == {expected}


def test_root_rule_validation():
    with pytest.raises(ValueError):
        bfs_tree_program(root_rule="highest-id")
