import random

import networkx as nx
import pytest

from congestlab.graphs import Graph


def to_nx(g: Graph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(g.nodes())
    out.add_edges_from(g.edges)
    return out


def from_nx(h: nx.Graph) -> Graph:
    relabel = {v: i for i, v in enumerate(sorted(h.nodes()))}
    return Graph.from_edges(len(relabel), [(relabel[u], relabel[v]) for u, v in h.edges()])


def atlas(max_nodes: int):
    """Every graph up to isomorphism with 1..max_nodes nodes (max 7)."""
    return [from_nx(h) for h in nx.graph_atlas_g() if 1 <= h.number_of_nodes() <= max_nodes]


@pytest.fixture
def rng():
    return random.Random(12345)
