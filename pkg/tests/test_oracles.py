import random

import pytest
from networkx.algorithms import isomorphism as iso

from congestlab.graphs import CliqueCover, Coloring, ScaleError, complete_graph, cycle_graph, gnp_graph, path_graph
from congestlab.oracles import (
    check_clique_cover,
    iter_embeddings,
    min_s_clique_cover,
    oracle_mcis,
    oracle_multicolored,
    oracle_subgraph,
)
from congestlab.structure import complement

from conftest import to_nx


def nx_has(g, h, induced):
    gm = iso.GraphMatcher(to_nx(g), to_nx(h))
    return gm.subgraph_is_isomorphic() if induced else gm.subgraph_is_monomorphic()


def test_subgraph_oracle_matches_networkx():
    rng = random.Random(5)
    for _ in range(150):
        g = gnp_graph(rng.randint(3, 9), rng.random(), rng)
        h = gnp_graph(rng.randint(2, 4), rng.random(), rng)
        for induced in (False, True):
            w = oracle_subgraph(g, h, induced)
            assert (w is not None) == nx_has(g, h, induced)
            if w is not None:
                assert w.is_valid(g, h)


def test_multicolored_uses_each_color_once():
    rng = random.Random(9)
    for _ in range(80):
        g = gnp_graph(8, 0.5, rng)
        chi = Coloring(tuple(rng.randint(0, 3) for _ in g.nodes()))
        h = path_graph(3)
        found = oracle_multicolored(g, h, chi, False)
        brute = False
        for w in iter_embeddings(g, h, False):
            if sorted(chi[v] for v in w.map) == [1, 2, 3]:
                brute = True
                break
        assert (found is not None) == brute
        if found:
            assert sorted(chi[v] for v in found.map) == [1, 2, 3]


def test_mcis_oracle_small_cases():
    assert oracle_mcis(path_graph(4), cycle_graph(4)).size == 3
    assert oracle_mcis(complete_graph(3), path_graph(3)).size == 2
    m = oracle_mcis(cycle_graph(5), path_graph(5))
    assert m.size == 4 and m.is_valid(cycle_graph(5), path_graph(5))


def test_scale_limits():
    with pytest.raises(ScaleError):
        oracle_subgraph(gnp_graph(20, 0.1, random.Random(0)), path_graph(9), True)
    # a small pattern is fine in a large host
    assert oracle_subgraph(gnp_graph(20, 0.5, random.Random(0)), path_graph(3), True) is not None


def test_clique_cover_of_complement_p5():
    h = complement(path_graph(5))
    cover = min_s_clique_cover(h, 3)
    assert check_clique_cover(h, cover) == []
    assert cover.t >= 1
    bad = CliqueCover(3, ((0, 1),))
    assert check_clique_cover(h, bad)


def test_clique_cover_of_clique_is_single_set():
    cover = min_s_clique_cover(complete_graph(4), 4)
    assert cover.sets == ((0, 1, 2, 3),)
