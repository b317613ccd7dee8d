"""Causal structures: DAGs with a visible/latent partition and cardinalities.

Also hosts the rewrites that bring any structure into exo-simplicial normal
form (exogenization, removal of dominated latents, covering of uncovered
visibles) and the district-based latent cardinality bounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Iterable, Mapping, Sequence

from .errors import (
    CyclicGraph,
    InvalidStructure,
    LatentNotExogenous,
    NotExoSimplicial,
    NotLatent,
)
from .graph import DirectedGraph, Vertex, build_graph


@dataclass(frozen=True, eq=False)
class CausalStructure:
    """A DAG whose vertices are split into visible and latent variables.

    ``cards`` holds one entry per vertex in graph order: an integer ``>= 1``
    for every visible vertex, and an optional cardinality hint (or ``None``)
    for latents.
    """

    graph: DirectedGraph
    latent_flags: tuple[bool, ...]
    cards: tuple[int | None, ...]

    def __post_init__(self):
        n = len(self.graph)
        if len(self.latent_flags) != n or len(self.cards) != n:
            raise InvalidStructure("latent flags and cardinalities must cover every vertex")
        if not self.graph.is_acyclic():
            raise CyclicGraph("a causal structure must be acyclic")
        for name, latent, k in zip(self.graph.names, self.latent_flags, self.cards):
            if k is not None and (not isinstance(k, int) or k < 1):
                raise InvalidStructure(f"cardinality of {name!r} must be an integer >= 1, got {k!r}")
            if not latent and k is None:
                raise InvalidStructure(f"visible vertex {name!r} needs a finite cardinality")

    @classmethod
    def build(
        cls,
        visible: Mapping[str, int] | Sequence[tuple[str, int]],
        latent: Mapping[str, int | None] | Sequence[str],
        edges: Iterable[tuple[str, str]],
    ) -> CausalStructure:
        """Visible vertices come first in graph order, then latents."""
        vis = list(visible.items()) if isinstance(visible, Mapping) else list(visible)
        if isinstance(latent, Mapping):
            lat = list(latent.items())
        else:
            lat = [(name, None) for name in latent]
        names = [v for v, _ in vis] + [l for l, _ in lat]
        graph = build_graph(names, edges)
        flags = tuple([False] * len(vis) + [True] * len(lat))
        cards = tuple(k for _, k in vis) + tuple(k for _, k in lat)
        return cls(graph, flags, cards)

    def __eq__(self, other):
        if not isinstance(other, CausalStructure):
            return NotImplemented
        return (
            self.graph == other.graph
            and self.latent_flags == other.latent_flags
            and self.cards == other.cards
        )

    def __hash__(self):
        return hash((self.graph, self.latent_flags, self.cards))

    def __repr__(self):
        return (
            f"CausalStructure(visible={list(self.visible)}, latent={list(self.latent)}, "
            f"edges={self.graph.named_edges()})"
        )

    @property
    def names(self) -> tuple[str, ...]:
        return self.graph.names

    @cached_property
    def visible(self) -> tuple[str, ...]:
        return tuple(n for n, f in zip(self.graph.names, self.latent_flags) if not f)

    @cached_property
    def latent(self) -> tuple[str, ...]:
        return tuple(n for n, f in zip(self.graph.names, self.latent_flags) if f)

    def is_latent(self, q: Vertex) -> bool:
        return self.latent_flags[self.graph.idx(q)]

    def card(self, q: Vertex) -> int | None:
        return self.cards[self.graph.idx(q)]

    @cached_property
    def visible_cards(self) -> tuple[int, ...]:
        return tuple(self.card(v) for v in self.visible)

    @cached_property
    def latent_hints(self) -> dict[str, int | None]:
        return {l: self.card(l) for l in self.latent}

    @cached_property
    def topo_position(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.graph.topological_order())}

    @cached_property
    def visible_topo(self) -> tuple[str, ...]:
        """Visible vertices in topological order."""
        return tuple(n for n in self.graph.topological_order() if not self.is_latent(n))

    def ordered_vpa(self, q: Vertex) -> tuple[str, ...]:
        """Visible parents sorted by topological position (the key order)."""
        return tuple(sorted(vpa(self, q), key=self.topo_position.__getitem__))

    def ordered_lpa(self, q: Vertex) -> tuple[str, ...]:
        return tuple(sorted(lpa(self, q), key=self.topo_position.__getitem__))

    def latent_children(self, l: Vertex) -> frozenset[str]:
        return self.graph.children(l)

    def with_graph(self, graph: DirectedGraph, flags=None, cards=None) -> CausalStructure:
        return CausalStructure(
            graph,
            self.latent_flags if flags is None else tuple(flags),
            self.cards if cards is None else tuple(cards),
        )


@dataclass(frozen=True)
class CardinalityBound:
    latent: str
    district: frozenset[str]
    conditioning: frozenset[str]
    descendant_part: frozenset[str]
    remainder: frozenset[str]
    value: int


def vpa(g: CausalStructure, q: Vertex) -> frozenset[str]:
    return frozenset(p for p in g.graph.parents(q) if not g.is_latent(p))


def lpa(g: CausalStructure, q: Vertex) -> frozenset[str]:
    return frozenset(p for p in g.graph.parents(q) if g.is_latent(p))


def _require_latent(g: CausalStructure, l: Vertex) -> int:
    i = g.graph.idx(l)
    if not g.latent_flags[i]:
        raise NotLatent(f"{g.names[i]!r} is not a latent vertex")
    return i


def exogenize(g: CausalStructure, l: Vertex) -> CausalStructure:
    """Connect every parent of ``l`` to every child of ``l``, then cut ``l``'s in-edges."""
    i = _require_latent(g, l)
    parents = g.graph.parent_indices(i)
    if not parents:
        return g
    children = g.graph.child_indices(i)
    edges = [e for e in g.graph.edges if e[1] != i]
    present = set(edges)
    for p in parents:
        for c in children:
            if (p, c) not in present:
                edges.append((p, c))
                present.add((p, c))
    return g.with_graph(DirectedGraph(g.names, edges))


def _drop_vertices(g: CausalStructure, drop: set[int]) -> CausalStructure:
    if not drop:
        return g
    keep = [i for i in range(len(g.graph)) if i not in drop]
    graph = g.graph.induced_subgraph(keep)
    return CausalStructure(
        graph,
        tuple(g.latent_flags[i] for i in keep),
        tuple(g.cards[i] for i in keep),
    )


def simplicial_reduce(g: CausalStructure) -> CausalStructure:
    """Delete childless latents and latents whose children are dominated by another's.

    Identical children sets keep the lowest-index latent.
    """
    latents = [g.graph.idx(l) for l in g.latent]
    for i in latents:
        if g.graph.parent_indices(i):
            raise LatentNotExogenous(f"latent {g.names[i]!r} has parents; exogenize first")
    kids = {i: frozenset(g.graph.child_indices(i)) for i in latents}
    drop = set()
    for i in latents:
        if not kids[i]:
            drop.add(i)
            continue
        for j in latents:
            if j == i or not kids[j]:
                continue
            if kids[i] < kids[j] or (kids[i] == kids[j] and j < i):
                drop.add(i)
                break
    return _drop_vertices(g, drop)


def _fresh_name(taken: set[str], base: str) -> str:
    name = base
    n = 1
    while name in taken:
        n += 1
        name = f"{base}_{n}"
    return name


def cover_visibles(g: CausalStructure) -> CausalStructure:
    """Give every visible vertex without a latent parent a private latent ``e_<name>``."""
    bare = [v for v in g.visible if not lpa(g, v)]
    if not bare:
        return g
    taken = set(g.names)
    names = list(g.names)
    edges = list(g.graph.edges)
    flags = list(g.latent_flags)
    cards = list(g.cards)
    for v in bare:
        name = _fresh_name(taken, f"e_{v}")
        taken.add(name)
        edges.append((len(names), g.graph.idx(v)))
        names.append(name)
        flags.append(True)
        cards.append(None)
    return CausalStructure(DirectedGraph(names, edges), tuple(flags), tuple(cards))


def normalize(g: CausalStructure) -> CausalStructure:
    """Return an observationally equivalent exo-simplicial structure.

    Latents are exogenized in topological order (this never re-creates
    parents for an already processed latent), dominated and childless
    latents are removed, and uncovered visibles receive a private latent.
    """
    if not g.graph.is_acyclic():
        raise CyclicGraph("cannot normalize a cyclic graph")
    out = g
    for l in [n for n in g.graph.topological_order() if g.is_latent(n)]:
        out = exogenize(out, l)
    out = simplicial_reduce(out)
    return cover_visibles(out)


def facets(g: CausalStructure) -> list[frozenset[str]]:
    """Latent children sets, sorted canonically (by sorted visible indices)."""
    idx = {v: i for i, v in enumerate(g.visible)}
    sets = [frozenset(g.latent_children(l)) for l in g.latent]
    return sorted(sets, key=lambda s: sorted(idx.get(v, -1) for v in s))


def is_exo_simplicial(g: CausalStructure) -> bool:
    kid_sets = []
    for l in g.latent:
        if g.graph.parents(l):
            return False
        kids = g.latent_children(l)
        if not kids or any(g.is_latent(c) for c in kids):
            return False
        kid_sets.append(kids)
    for i, a in enumerate(kid_sets):
        for j, b in enumerate(kid_sets):
            if i != j and a <= b:
                return False
    covered = set().union(*kid_sets) if kid_sets else set()
    return covered == set(g.visible)


def normalization_changes(before: CausalStructure, after: CausalStructure) -> dict[str, list]:
    """Name-level difference between a structure and its normal form."""
    e0 = set(before.graph.named_edges())
    e1 = set(after.graph.named_edges())
    order = {n: i for i, n in enumerate(before.names + after.names)}
    key = lambda e: (order[e[0]], order[e[1]])
    return {
        "edges_added": sorted(e1 - e0, key=key),
        "edges_removed": sorted(e0 - e1, key=key),
        "latents_removed": [l for l in before.latent if l not in after.names],
        "latents_added": [l for l in after.latent if l not in before.names],
    }


def _require_exo_simplicial(g: CausalStructure):
    if not is_exo_simplicial(g):
        raise NotExoSimplicial("operation requires an exo-simplicial structure; normalize first")


def district(g: CausalStructure, xi: Vertex) -> frozenset[str]:
    """Visible vertices reachable from ``xi`` through latent-child links."""
    _require_latent(g, xi)
    _require_exo_simplicial(g)
    start = g.names[g.graph.idx(xi)]
    seen_latent = {start}
    found: set[str] = set()
    frontier = [start]
    while frontier:
        l = frontier.pop()
        for v in g.latent_children(l):
            if v in found:
                continue
            found.add(v)
            for m in lpa(g, v):
                if m not in seen_latent:
                    seen_latent.add(m)
                    frontier.append(m)
    return frozenset(found)


def _space(g: CausalStructure, vs: Iterable[str]) -> int:
    return prod(g.card(v) for v in vs)


def cardinality_bound(g: CausalStructure, xi: Vertex) -> CardinalityBound:
    """Upper bound on the cardinality a latent needs.

    The affine dimension of a table of conditional distributions of ``D``
    given ``D̄`` is counted as its number of free parameters,
    ``|Ω_D̄|·(|Ω_D| − 1)``. This counting rule is our reading, not a closed
    formula from the literature. The returned value is
    ``|Ω_D̄|·(|Ω_D| − |Ω_B|)``, clamped to at least 1.
    """
    d = district(g, xi)
    name = g.names[g.graph.idx(xi)]
    cond = frozenset(p for v in d for p in vpa(g, v)) - d
    a = g.graph.descendants(name) & d
    b = d - a
    value = _space(g, cond) * (_space(g, d) - _space(g, b))
    return CardinalityBound(name, d, cond, frozenset(a), b, max(1, value))
