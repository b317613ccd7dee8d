"""Possibilistic compatibility: does some functional model realize exactly a given support?

The search fixes every latent cardinality to ``W = |σ|`` and pins the
diagonal world ``(i, i, ..., i)`` to the ``i``-th support event. Forced table
entries are propagated across worlds, and the remaining entries are branched
on depth first. Any completion in which every world observes a member of
``σ`` is a certificate: the diagonal worlds already realize all of ``σ``.

Why one diagonal seeding suffices: given any model realizing ``σ`` with
arbitrary latent cardinalities, pick for each event ``e_i`` one latent
valuation producing it and relabel each latent so that value ``i`` stands
for that valuation's coordinate. Restricted to ``W`` values per latent, the
diagonal world ``i`` then reproduces ``e_i`` and every other world is still
a world of the original model, hence observes a member of ``σ``.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import CardinalityMismatch, EmptySupport, IncompleteTable, VariableMismatch
from .prob import Support
from .structure import CausalStructure, is_exo_simplicial, normalize, normalization_changes
from .worlds import FunctionTable, LatentSpec, Layout, simulate


@dataclass(frozen=True)
class Certificate:
    """A complete functional model over the structure's normal form.

    ``events`` lists the support in the order used for diagonal seeding; it
    is empty for witnesses that were not produced by the support search.
    """

    structure: CausalStructure
    latent_cards: Mapping[str, int]
    table: FunctionTable
    events: tuple[tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class Verdict:
    compatible: bool
    certificate: Certificate | None
    nodes: int
    backtracks: int
    structure: CausalStructure
    changes: dict = field(default_factory=dict)

    def __bool__(self):
        return self.compatible


def prepare(structure: CausalStructure) -> tuple[CausalStructure, dict]:
    """Normal form of ``structure`` and the change log (empty if already normal)."""
    if is_exo_simplicial(structure):
        return structure, normalization_changes(structure, structure)
    normal = normalize(structure)
    return normal, normalization_changes(structure, normal)


def support_events(structure: CausalStructure, sigma: Support) -> list[tuple[int, ...]]:
    """Events of ``sigma`` in the structure's visible order, sorted."""
    if not sigma.events:
        raise EmptySupport("the support must contain at least one event")
    if set(sigma.variables) != set(structure.visible) or len(sigma.variables) != len(structure.visible):
        raise VariableMismatch(
            f"support variables {list(sigma.variables)} differ from visibles {list(structure.visible)}"
        )
    sigma = sigma.reorder(structure.visible)
    if sigma.cards != structure.visible_cards:
        raise CardinalityMismatch(
            f"support cardinalities {list(sigma.cards)} differ from structure {list(structure.visible_cards)}"
        )
    return list(sigma.events)


class _Search:
    """Mutable search state with an undo trail."""

    def __init__(self, layout: Layout, events: Sequence[tuple[int, ...]]):
        self.layout = layout
        self.events = list(events)
        self.n = len(layout.visible)
        nw = layout.n_worlds
        self.vals: list[list[int | None]] = [[None] * self.n for _ in range(nw)]
        self.allowed: list[list[tuple[int, ...]]] = [self.events] * nw
        self.table: dict[tuple[int, tuple], int] = {}
        self.trail: list[tuple] = []
        self.waiters: dict[tuple[int, tuple], set[int]] = {}
        self.queue: list[int] = []
        self.check_realized = False

    def pin_diagonal(self):
        k = min(self.layout.kl) if self.layout.kl else 1
        seeds = min(k, len(self.events))
        for i in range(seeds):
            w = self.layout.world_index([i] * len(self.layout.kl))
            self.allowed[w] = [self.events[i]]
        self.check_realized = seeds < len(self.events)

    def _set_entry(self, v, key, x):
        self.table[(v, key)] = x
        self.trail.append(("t", (v, key)))
        self.queue.extend(self.waiters.get((v, key), ()))

    def _assign(self, w, v, x):
        self.vals[w][v] = x
        self.trail.append(("v", w, v))

    def undo(self, mark: int):
        while len(self.trail) > mark:
            item = self.trail.pop()
            if item[0] == "t":
                del self.table[item[1]]
            else:
                self.vals[item[1]][item[2]] = None
        self.queue.clear()

    def candidates(self, w) -> list[tuple[int, ...]]:
        vals = self.vals[w]
        known = [(i, x) for i, x in enumerate(vals) if x is not None]
        return [e for e in self.allowed[w] if all(e[i] == x for i, x in known)]

    def settle(self, w) -> bool:
        """Evaluate world ``w`` as far as possible, forcing entries it pins down."""
        lay = self.layout
        vals = self.vals[w]
        lam = lay.worlds[w]
        while True:
            pending = []
            for v in lay.order:
                if vals[v] is not None or any(vals[u] is None for u in lay.vpa[v]):
                    continue
                key = lay.key(v, vals, lam)
                x = self.table.get((v, key))
                if x is None:
                    pending.append((v, key))
                    self.waiters.setdefault((v, key), set()).add(w)
                else:
                    self._assign(w, v, x)
            cands = self.candidates(w)
            if not cands:
                return False
            forced = False
            for v, key in pending:
                if (v, key) in self.table:
                    # set earlier in this pass by a sibling entry of the same world
                    continue
                options = {e[v] for e in cands}
                if len(options) == 1:
                    self._set_entry(v, key, options.pop())
                    forced = True
            if not forced:
                return True

    def propagate(self) -> bool:
        while self.queue:
            w = self.queue.pop()
            if not self.settle(w):
                self.queue.clear()
                return False
        return True

    def choose(self):
        """Most constrained incomplete world and its first open entry, or None if all complete."""
        best = None
        for w, vals in enumerate(self.vals):
            if None not in vals:
                continue
            c = len(self.candidates(w))
            if best is None or c < best[0]:
                best = (c, w)
        if best is None:
            return None
        w = best[1]
        lay = self.layout
        vals = self.vals[w]
        for v in lay.order:
            if vals[v] is None and all(vals[u] is not None for u in lay.vpa[v]):
                key = lay.key(v, vals, lay.worlds[w])
                options = sorted({e[v] for e in self.candidates(w)})
                return w, v, key, options
        raise AssertionError("incomplete world without an open entry")

    def realized_ok(self) -> bool:
        if not self.check_realized:
            return True
        return {tuple(v) for v in self.vals} == set(self.events)

    def apply(self, w, v, key, x) -> bool:
        self._set_entry(v, key, x)
        self.queue.append(w)
        return self.propagate()

    def search(self) -> tuple[dict | None, int, int]:
        """Depth-first completion. Returns (table or None, nodes, backtracks)."""
        pick = self.choose()
        if pick is None:
            return (dict(self.table) if self.realized_ok() else None), 1, 0
        w, v, key, options = pick
        nodes, backtracks = 1, 0
        for x in options:
            mark = len(self.trail)
            if self.apply(w, v, key, x):
                found, n, b = self.search()
                nodes += n
                backtracks += b
                if found is not None:
                    return found, nodes, backtracks
            self.undo(mark)
            backtracks += 1
        return None, nodes, backtracks


def _start(layout: Layout, events) -> _Search | None:
    s = _Search(layout, events)
    s.pin_diagonal()
    s.queue = list(range(layout.n_worlds))
    return s if s.propagate() else None


def _branch_worker(args):
    structure, kl, events, pick, x = args
    layout = Layout(structure, kl)
    s = _start(layout, events)
    w, v, key, _ = pick
    if not s.apply(w, v, key, x):
        return None, 0, 0
    return s.search()


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("PW_THREADS", "1") or 1)
    return max(1, threads)


def decide_support(structure: CausalStructure, sigma: Support, *,
                   latent_cards: Mapping[str, int] | None = None,
                   threads: int | None = None) -> Verdict:
    """Decide whether some functional model over ``structure`` has support exactly ``sigma``.

    Latent cardinalities default to ``|σ|``, where the answer is exact.
    Supplying smaller ``latent_cards`` gives an exploratory run: a
    ``compatible`` answer is still trustworthy, an incompatible one is not.
    """
    normal, changes = prepare(structure)
    events = support_events(normal, sigma)
    W = len(events)
    kl = {l: W for l in normal.latent}
    if latent_cards is not None:
        kl.update({l: int(k) for l, k in latent_cards.items() if l in kl})
    layout = Layout(normal, kl)

    root = _start(layout, events)
    if root is None:
        return Verdict(False, None, 1, 0, normal, changes)
    threads = _resolve_threads(threads)
    pick = root.choose()
    if threads == 1 or pick is None or len(pick[3]) < 2:
        found, nodes, backtracks = root.search()
    else:
        jobs = [(normal, layout.kl, events, pick, x) for x in pick[3]]
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            results = list(pool.map(_branch_worker, jobs))
        found, nodes, backtracks = None, 1, 0
        for res, n, b in results:
            nodes += n
            if res is not None:
                backtracks += b
                found = res
                break
            backtracks += b + 1
    if found is None:
        return Verdict(False, None, nodes, backtracks, normal, changes)
    table = FunctionTable()
    for (v, key), x in sorted(found.items()):
        table.set(layout.visible[v], key, x)
    cert = Certificate(normal, layout.latent_card_map(), table, tuple(events))
    return Verdict(True, cert, nodes, backtracks, normal, changes)


def verify_certificate(structure: CausalStructure, cert: Certificate, sigma: Support) -> bool:
    """Replay a certificate: uniform latents must give support exactly ``sigma``,
    and each diagonal world ``i`` must observe the certificate's ``i``-th event.
    """
    normal = cert.structure
    if not is_exo_simplicial(structure):
        structure = normalize(structure)
    if structure != normal:
        return False
    try:
        events = support_events(normal, sigma)
    except (VariableMismatch, CardinalityMismatch, EmptySupport):
        return False
    layout = Layout(normal, cert.latent_cards)
    dist = simulate(normal, cert.table, LatentSpec(dict(cert.latent_cards)))
    if set(dist.outcomes()) != set(events):
        return False
    k = min(layout.kl) if layout.kl else 1
    for i, e in enumerate(cert.events):
        if i >= k:
            break
        ev = layout.evaluate(cert.table, [i] * len(layout.kl))
        if ev.blocked is not None:
            raise IncompleteTable([ev.blocked])
        if ev.outcome != tuple(e):
            return False
    return True
