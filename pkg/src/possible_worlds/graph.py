"""Immutable directed graphs with dense integer indexing.

Vertices are addressed by name at the API boundary and by their declaration
index internally. All iteration orders are derived from declaration order so
that every downstream output is reproducible byte for byte.
"""
from __future__ import annotations

import heapq
from typing import Iterable, Sequence, Union

from .errors import CyclicGraph, DuplicateEdge, DuplicateVertex, UnknownEndpoint, UnknownVertex

Vertex = Union[str, int]


class DirectedGraph:
    """A finite directed graph ``(Q, E)``.

    Self-loops are representable; they make the graph cyclic.
    """

    __slots__ = ("names", "index", "edges", "_parents", "_children")

    def __init__(self, names: Sequence[str], edges: Iterable[tuple[int, int]]):
        self.names = tuple(names)
        self.index = {name: i for i, name in enumerate(self.names)}
        self.edges = tuple(edges)
        parents: list[list[int]] = [[] for _ in self.names]
        children: list[list[int]] = [[] for _ in self.names]
        for q, u in self.edges:
            children[q].append(u)
            parents[u].append(q)
        self._parents = tuple(tuple(sorted(p)) for p in parents)
        self._children = tuple(tuple(sorted(c)) for c in children)

    def __len__(self):
        return len(self.names)

    def __contains__(self, q):
        if isinstance(q, int):
            return 0 <= q < len(self.names)
        return q in self.index

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.names == other.names and self.edge_set() == other.edge_set()

    def __hash__(self):
        return hash((self.names, frozenset(self.edges)))

    def __repr__(self):
        return f"DirectedGraph({len(self.names)} vertices, {len(self.edges)} edges)"

    def idx(self, q: Vertex) -> int:
        if isinstance(q, int) and not isinstance(q, bool):
            if 0 <= q < len(self.names):
                return q
            raise UnknownVertex(q)
        try:
            return self.index[q]
        except KeyError:
            raise UnknownVertex(q) from None

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def named_edges(self) -> list[tuple[str, str]]:
        """Edges as name pairs, sorted by (tail index, head index)."""
        return [(self.names[q], self.names[u]) for q, u in sorted(self.edges)]

    # index-level adjacency, used by the solvers
    def parent_indices(self, i: int) -> tuple[int, ...]:
        return self._parents[i]

    def child_indices(self, i: int) -> tuple[int, ...]:
        return self._children[i]

    def parents(self, q: Vertex) -> frozenset[str]:
        return frozenset(self.names[p] for p in self._parents[self.idx(q)])

    def children(self, q: Vertex) -> frozenset[str]:
        return frozenset(self.names[c] for c in self._children[self.idx(q)])

    def _reach(self, sources: Iterable[Vertex], step) -> frozenset[str]:
        start = [self.idx(q) for q in sources]
        seen: set[int] = set()
        stack = [n for s in start for n in step(s)]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(step(n))
        return frozenset(self.names[i] for i in seen)

    def ancestors(self, qs: Iterable[Vertex]) -> frozenset[str]:
        """Union of the ancestors of each member of ``qs``.

        A vertex is only its own ancestor when it lies on a directed cycle.
        """
        return self._reach(_as_iterable(qs), self.parent_indices)

    def descendants(self, qs: Iterable[Vertex]) -> frozenset[str]:
        return self._reach(_as_iterable(qs), self.child_indices)

    def induced_subgraph(self, keep: Iterable[Vertex]) -> DirectedGraph:
        """Subgraph on ``keep`` with every edge between kept vertices.

        Kept vertices retain their relative declaration order.
        """
        wanted = {self.idx(q) for q in _as_iterable(keep)}
        order = sorted(wanted)
        remap = {old: new for new, old in enumerate(order)}
        edges = [(remap[q], remap[u]) for q, u in self.edges if q in wanted and u in wanted]
        return DirectedGraph([self.names[i] for i in order], edges)

    def topological_indices(self) -> list[int] | None:
        """Kahn's algorithm, ties broken by lowest declaration index."""
        indegree = [len(p) for p in self._parents]
        heap = [i for i, d in enumerate(indegree) if d == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            i = heapq.heappop(heap)
            order.append(i)
            for c in self._children[i]:
                indegree[c] -= 1
                if indegree[c] == 0:
                    heapq.heappush(heap, c)
        if len(order) != len(self.names):
            return None
        return order

    def is_acyclic(self) -> bool:
        return self.topological_indices() is not None

    def topological_order(self) -> list[str]:
        order = self.topological_indices()
        if order is None:
            raise CyclicGraph("graph contains a directed cycle")
        return [self.names[i] for i in order]


def _as_iterable(qs):
    if isinstance(qs, (str, int)):
        return (qs,)
    return qs


def build_graph(vertices: Sequence[str], edges: Iterable[tuple[str, str]]) -> DirectedGraph:
    """Build a graph from vertex names and ``(tail, head)`` name pairs."""
    index: dict[str, int] = {}
    for name in vertices:
        if name in index:
            raise DuplicateVertex(f"duplicate vertex {name!r}")
        index[name] = len(index)
    seen: set[tuple[int, int]] = set()
    indexed = []
    for q, u in edges:
        if q not in index or u not in index:
            missing = q if q not in index else u
            raise UnknownEndpoint(f"edge {q!r}->{u!r} uses undeclared vertex {missing!r}")
        e = (index[q], index[u])
        if e in seen:
            raise DuplicateEdge(f"duplicate edge {q!r}->{u!r}")
        seen.add(e)
        indexed.append(e)
    return DirectedGraph(list(vertices), indexed)
