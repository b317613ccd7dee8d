"""Uniformly induced distributions and the order-K probabilistic test.

Enumeration walks worlds in lexicographic latent order and only branches on
table entries that some world actually queries, so superfluous entries are
never enumerated. Assignments whose world-observation sequence is not the
smallest in its latent-relabeling orbit are cut as soon as a known prefix
proves it. Results are exact count vectors over the common denominator
``∏ k_ℓ``.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import EnumerationBudgetExceeded, VariableMismatch
from .possibilistic import Certificate, prepare
from .prob import Distribution, EpsilonBound, epsilon_bound
from .structure import CausalStructure, cardinality_bound
from .worlds import FunctionTable, Layout, latent_permutations, prefix_is_canonical, world_permutation

DEFAULT_NODE_CAP = 10**8


@dataclass
class UniformSet:
    structure: CausalStructure
    latent_cards: dict[str, int]
    members: list[tuple[int, ...]]
    witnesses: dict[tuple[int, ...], FunctionTable] | None
    nodes: int

    @property
    def denominator(self) -> int:
        d = 1
        for k in self.latent_cards.values():
            d *= k
        return d

    def __len__(self):
        return len(self.members)

    def distribution(self, counts: Sequence[int]) -> Distribution:
        return Distribution.from_counts(self.structure.visible, self.structure.visible_cards, counts)

    def distributions(self) -> list[Distribution]:
        return [self.distribution(c) for c in self.members]

    def certificate(self, counts: Sequence[int]) -> Certificate:
        if self.witnesses is None:
            raise ValueError("enumeration was run without witnesses")
        return Certificate(self.structure, dict(self.latent_cards), self.witnesses[tuple(counts)])


class _Enumerator:
    def __init__(self, layout: Layout, symmetry: bool, witnesses: bool, node_cap: int):
        self.layout = layout
        self.table: dict[tuple[int, tuple], int] = {}
        self.codes: list[int] = []
        self.found: dict[tuple[int, ...], dict | None] = {}
        self.witnesses = witnesses
        self.node_cap = node_cap
        self.nodes = 0
        self.inverses: list[list[int]] = []
        if symmetry:
            identity = list(range(layout.n_worlds))
            for perms in latent_permutations(layout.kl):
                image = world_permutation(layout, perms)
                if image == identity:
                    continue
                inv = [0] * len(image)
                for w, i in enumerate(image):
                    inv[i] = w
                self.inverses.append(inv)

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.node_cap:
            raise EnumerationBudgetExceeded(
                f"enumeration exceeded the node cap of {self.node_cap}", nodes=self.nodes)

    def first_open(self, w: int):
        """Evaluate world ``w``; return ``(code, None)`` or ``(None, (v, key))``."""
        lay = self.layout
        lam = lay.worlds[w]
        vals = [0] * len(lay.visible)
        for v in lay.order:
            key = lay.key(v, vals, lam)
            x = self.table.get((v, key))
            if x is None:
                return None, (v, key)
            vals[v] = x
        return lay.outcome_index(vals), None

    def run(self, w: int = 0):
        lay = self.layout
        if w == lay.n_worlds:
            counts = [0] * lay.n_outcomes
            for c in self.codes:
                counts[c] += 1
            counts = tuple(counts)
            if counts not in self.found:
                self.found[counts] = dict(self.table) if self.witnesses else None
            return
        code, open_entry = self.first_open(w)
        if open_entry is not None:
            v, key = open_entry
            for x in range(lay.vcards[v]):
                self._tick()
                self.table[(v, key)] = x
                self.run(w)
                del self.table[(v, key)]
            return
        self.codes.append(code)
        if prefix_is_canonical(self.codes, self.inverses):
            self.run(w + 1)
        self.codes.pop()


def _enumerate_branch(args):
    structure, kl, symmetry, witnesses, node_cap, entry, x = args
    e = _Enumerator(Layout(structure, kl), symmetry, witnesses, node_cap)
    e.table[entry] = x
    e.nodes = 1
    e.run(0)
    return e.found, e.nodes


def _to_table(layout: Layout, raw: dict) -> FunctionTable:
    t = FunctionTable()
    for (v, key), x in sorted(raw.items()):
        t.set(layout.visible[v], key, x)
    return t


def enumerate_uniform(structure: CausalStructure, latent_cards: Mapping[str, int] | int, *,
                      symmetry: bool = True, witnesses: bool = True,
                      node_cap: int = DEFAULT_NODE_CAP, threads: int | None = None) -> UniformSet:
    """All distributions induced by uniform latents at the given cardinalities.

    ``latent_cards`` may be one integer applied to every latent. The
    structure is normalized first; latent names refer to the normal form.
    Members are sorted by count vector; each witness is the first table
    met in depth-first order.
    """
    normal, _ = prepare(structure)
    if isinstance(latent_cards, int):
        kl = {l: latent_cards for l in normal.latent}
    else:
        missing = set(normal.latent) - set(latent_cards)
        if missing:
            raise VariableMismatch(f"no cardinality given for latents {sorted(missing)}")
        kl = {l: int(latent_cards[l]) for l in normal.latent}
    layout = Layout(normal, kl)
    if threads is None:
        threads = int(os.environ.get("PW_THREADS", "1") or 1)

    probe = _Enumerator(layout, symmetry, witnesses, node_cap)
    _, first = probe.first_open(0) if layout.n_worlds else (None, None)
    if threads <= 1 or first is None:
        probe.run(0)
        found, nodes = probe.found, probe.nodes
    else:
        v, _ = first
        jobs = [(normal, layout.kl, symmetry, witnesses, node_cap, first, x)
                for x in range(layout.vcards[v])]
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            parts = list(pool.map(_enumerate_branch, jobs))
        found, nodes = {}, 0
        for part, n in parts:
            nodes += n
            for counts, table in part.items():
                found.setdefault(counts, table)
        if nodes > node_cap:
            raise EnumerationBudgetExceeded(
                f"enumeration exceeded the node cap of {node_cap}", nodes=nodes)
    members = sorted(found)
    wit = {c: _to_table(layout, found[c]) for c in members} if witnesses else None
    return UniformSet(normal, layout.latent_card_map(), members, wit, nodes)


def min_distance_to_uniform(p: Distribution, uniform: UniformSet) -> tuple[Fraction, tuple[int, ...]]:
    """Exact minimum L1 distance from ``p`` to the set; ties go to the first member."""
    s = uniform.structure
    if set(p.variables) != set(s.visible) or len(p.variables) != len(s.visible):
        raise VariableMismatch(f"distribution over {list(p.variables)}, structure over {list(s.visible)}")
    p = p.reorder(s.visible)
    if p.cards != s.visible_cards:
        raise VariableMismatch("cardinalities differ from the structure's")
    if not uniform.members:
        raise ValueError("empty set of uniformly induced distributions")
    n = uniform.denominator
    target = [w * n for w in p.dense()]
    best = None
    for counts in uniform.members:
        d = sum(abs(t - c) for t, c in zip(target, counts))
        if best is None or d < best[0]:
            best = (d, counts)
    return Fraction(best[0]) / n, best[1]


@dataclass(frozen=True)
class HierarchyResult:
    K: int
    bound: EpsilonBound
    passed: bool
    distance: Fraction
    nearest: Distribution
    certificate: Certificate | None
    latent_bounds: dict[str, int] = field(default_factory=dict)
    C_override: int | None = None
    size: int = 0
    nodes: int = 0

    @property
    def epsilon(self) -> Fraction:
        return self.bound.epsilon


def latent_bounds(structure: CausalStructure) -> dict[str, int]:
    """Per-latent cardinality cap: the declared hint when present, else the district bound."""
    normal, _ = prepare(structure)
    out = {}
    for l in normal.latent:
        hint = normal.latent_hints[l]
        out[l] = hint if hint is not None else cardinality_bound(normal, l).value
    return out


def order_k_test(structure: CausalStructure, p: Distribution, K: int, *,
                 C: int | None = None, node_cap: int = DEFAULT_NODE_CAP,
                 threads: int | None = None) -> HierarchyResult:
    """Pass iff some uniformly induced distribution at latent cardinality ``K`` lies within ε(K) of ``p``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    normal, _ = prepare(structure)
    bounds = latent_bounds(normal)
    L = len(normal.latent)
    c_max = C if C is not None else max(bounds.values())
    eps = epsilon_bound(L, c_max, K)
    uniform = enumerate_uniform(normal, K, node_cap=node_cap, threads=threads)
    delta, counts = min_distance_to_uniform(p, uniform)
    passed = delta <= eps.epsilon
    return HierarchyResult(
        K=K,
        bound=eps,
        passed=passed,
        distance=delta,
        nearest=uniform.distribution(counts),
        certificate=uniform.certificate(counts),
        latent_bounds=bounds,
        C_override=C,
        size=len(uniform),
        nodes=uniform.nodes,
    )
