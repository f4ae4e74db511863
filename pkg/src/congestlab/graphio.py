"""Plain-text graph format.

First line ``n m``, then ``m`` lines ``u v`` with ``u < v``.  Lines starting
with ``#`` are comments; ``# role <id> <label>`` attaches a label to a node.
Other ``# <key> ...`` lines are kept as sidecar records.
"""

from __future__ import annotations

from pathlib import Path

from .graphs import Graph, GraphError

__all__ = ["dumps_graph", "loads_graph", "read_graph", "write_graph", "GraphFormatError"]


class GraphFormatError(GraphError):
    pass


def dumps_graph(g: Graph, extra: list[str] | None = None) -> str:
    lines = [f"{g.node_count} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    if g.roles is not None:
        lines.extend(f"# role {v} {label}" for v, label in enumerate(g.roles))
    for rec in extra or []:
        lines.append(f"# {rec}")
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> tuple[Graph, list[str]]:
    """Parse the text format; returns the graph and any non-role sidecar records."""
    header = None
    edges = []
    roles: dict[int, str] = {}
    extra: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            parts = body.split(None, 2)
            if parts and parts[0] == "role":
                if len(parts) < 3:
                    raise GraphFormatError(f"line {lineno}: malformed role record")
                roles[int(parts[1])] = parts[2]
            elif body:
                extra.append(body)
            continue
        fields = line.split()
        if len(fields) != 2:
            raise GraphFormatError(f"line {lineno}: expected two integers")
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
        if header is None:
            header = (a, b)
        else:
            if not a < b:
                raise GraphFormatError(f"line {lineno}: edges must be written as u < v")
            edges.append((a, b))
    if header is None:
        raise GraphFormatError("missing 'n m' header")
    n, m = header
    if m != len(edges):
        raise GraphFormatError(f"header declares {m} edges, found {len(edges)}")
    if len(set(edges)) != len(edges):
        raise GraphFormatError("duplicate edge")
    role_list = None
    if roles:
        role_list = [roles.get(v, str(v)) for v in range(n)]
    try:
        g = Graph.from_edges(n, edges, role_list)
    except GraphError as exc:
        raise GraphFormatError(str(exc)) from None
    return g, extra


def read_graph(path: str | Path) -> tuple[Graph, list[str]]:
    return loads_graph(Path(path).read_text())


def write_graph(path: str | Path, g: Graph, extra: list[str] | None = None) -> None:
    Path(path).write_text(dumps_graph(g, extra))
