"""Centralized maximum common induced subgraph around minimum vertex covers."""

from __future__ import annotations

from ..graphs import Graph, GraphError, McisMapping, as_graph
from ..structure import is_vertex_cover, min_vertex_cover, vertex_cover_number
from .core import McisCounters, local_image, mcis_search

__all__ = ["mcis_centralized", "mcis_with_counters"]


def _minimum_cover(g: Graph):
    return min_vertex_cover(g, vertex_cover_number(g))


def mcis_with_counters(g: Graph, h: Graph, cover_g=None, cover_h=None) -> tuple[McisMapping, McisCounters]:
    g, h = as_graph(g), as_graph(h)
    cover_g = _minimum_cover(g) if cover_g is None else cover_g
    cover_h = _minimum_cover(h) if cover_h is None else cover_h
    if not is_vertex_cover(g, cover_g) or not is_vertex_cover(h, cover_h):
        raise GraphError("cover_g and cover_h must be vertex covers")
    counters = McisCounters()
    plan, (g_table, h_table) = mcis_search(g, h, cover_g, cover_h, counters)
    cover = set(cover_g)
    rank_of: dict[int, tuple[int, int]] = {}
    for sig, members in enumerate(g_table.members):
        for r, v in enumerate(members):  # members come out in ascending id order
            rank_of[v] = (sig, r)
    assign = []
    for v in g.nodes():
        if v in cover:
            assign.append(local_image(plan, h_table.members, v, None, 0))
        else:
            sig, r = rank_of[v]
            assign.append(local_image(plan, h_table.members, v, sig, r))
    mapping = McisMapping(tuple(assign))
    if mapping.size != plan.size:
        raise RuntimeError(f"realized {mapping.size} nodes, planned {plan.size}")
    return mapping, counters


def mcis_centralized(g: Graph, h: Graph, cover_g=None, cover_h=None) -> McisMapping:
    """Maximum common induced subgraph; covers should be minimum for the
    enumeration bounds to hold, though any vertex covers give a correct answer.
    Omitted covers are computed."""
    return mcis_with_counters(g, h, cover_g, cover_h)[0]
