"""Three-round induced 2-edge path detection in broadcast CONGEST.

A graph has no induced path on three nodes exactly when every component is
a clique.  In a clique component all nodes share their degree and the least
id of their closed neighbourhood, so a node reports when a neighbour's degree
differs from its own or two neighbours disagree on that least id.
"""

from __future__ import annotations

from ..sim import GeneratorProgram, ModelKind, NodeContext, SimModel, decode_uint, encode_uint

__all__ = ["InducedP2Program", "induced_p2_program"]


class InducedP2Program(GeneratorProgram):
    # the second round carries a least id and a degree side by side
    message_words = 2

    def model_for(self, kind=ModelKind.BROADCAST_CONGEST, n: int = 2) -> SimModel:
        return SimModel.for_graph(kind, n, self.message_words)

    def body(self, ctx: NodeContext):
        width = ctx.id_bits
        inbox = yield encode_uint(ctx.node_id, width)
        least = min([ctx.node_id] + [decode_uint(m) for m in inbox.values()])
        inbox = yield encode_uint(least, width) + encode_uint(ctx.degree, width)
        heard = [(decode_uint(m[:width]), decode_uint(m[width:])) for m in inbox.values()]
        degree_differs = any(deg != ctx.degree for _, deg in heard)
        least_differs = len({lst for lst, _ in heard}) > 1
        return degree_differs or least_differs


def induced_p2_program() -> InducedP2Program:
    return InducedP2Program()
