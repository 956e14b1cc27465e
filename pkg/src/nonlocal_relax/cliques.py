"""Maximal clique enumeration on small dense graphs.

Vertex sets are Python ints used as bitsets; bit ``v`` stands for vertex ``v``.
"""
from __future__ import annotations

from typing import Iterator, Sequence


def _bits(s: int) -> Iterator[int]:
    while s:
        low = s & -s
        yield low.bit_length() - 1
        s ^= low


def degeneracy_order(adj: Sequence[int], vertices: int) -> list[int]:
    """Repeatedly remove a vertex of minimum remaining degree (ties: lowest index)."""
    remaining = vertices
    deg = {v: (adj[v] & vertices).bit_count() for v in _bits(vertices)}
    order = []
    while remaining:
        v = min(_bits(remaining), key=lambda u: (deg[u], u))
        order.append(v)
        remaining &= ~(1 << v)
        for u in _bits(adj[v] & remaining):
            deg[u] -= 1
    return order


def maximal_cliques(adj: Sequence[int], vertices: int | None = None) -> list[list[int]]:
    """All maximal cliques of the graph restricted to ``vertices``.

    ``adj[v]`` is the neighbour bitset of ``v`` without ``v`` itself. The
    outer loop follows a degeneracy ordering; inner recursion pivots on the
    vertex of P | X with the most neighbours in P.
    """
    if vertices is None:
        vertices = (1 << len(adj)) - 1
    adj = [a & vertices for a in adj]
    out: list[list[int]] = []

    def expand(R: list[int], P: int, X: int) -> None:
        if not P:
            if not X:
                out.append(sorted(R))
            return
        pivot = max(_bits(P | X), key=lambda u: ((adj[u] & P).bit_count(), -u))
        for v in _bits(P & ~adj[pivot]):
            R.append(v)
            expand(R, P & adj[v], X & adj[v])
            R.pop()
            P &= ~(1 << v)
            X |= 1 << v

    later = vertices
    for v in degeneracy_order(adj, vertices):
        later &= ~(1 << v)
        earlier = vertices & ~later & ~(1 << v)
        expand([v], adj[v] & later, adj[v] & earlier)
    return out


def adjacency_from_mask(mask) -> tuple[list[int], int]:
    """Neighbour bitsets and looped-vertex bitset of a symmetric boolean matrix."""
    n = len(mask)
    adj = [0] * n
    loops = 0
    for i in range(n):
        row = mask[i]
        bits = 0
        for j in range(n):
            if j != i and row[j]:
                bits |= 1 << j
        adj[i] = bits
        if row[i]:
            loops |= 1 << i
    return adj, loops
