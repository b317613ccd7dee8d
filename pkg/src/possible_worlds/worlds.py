"""Possible-worlds diagrams.

A diagram is stored as ``(structure, latent cardinalities, function table)``;
each world is the deterministic evaluation of the visibles under one latent
valuation. Function-table keys list the visible-parent values first, then
the latent-parent values, each group ordered topologically.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    IncompleteTable,
    InvalidDistribution,
    LatentNotExogenous,
    NotABijection,
    OrbitTooLarge,
    VariableMismatch,
)
from .prob import Distribution, parse_probability
from .structure import CausalStructure

Key = tuple[int, ...]
DEFAULT_ORBIT_CAP = 200_000


class FunctionTable:
    """Partial deterministic response tables, one per visible variable."""

    __slots__ = ("_t",)

    def __init__(self, entries: Mapping[str, Mapping[Sequence[int], int]] | None = None):
        self._t: dict[str, dict[Key, int]] = {}
        for v, rows in (entries or {}).items():
            self._t[v] = {tuple(k): int(x) for k, x in rows.items()}

    def get(self, v: str, key: Key):
        rows = self._t.get(v)
        return None if rows is None else rows.get(key)

    def set(self, v: str, key: Key, value: int):
        self._t.setdefault(v, {})[tuple(key)] = value

    def rows(self, v: str) -> dict[Key, int]:
        return self._t.get(v, {})

    def variables(self):
        return list(self._t)

    def entries(self) -> Iterator[tuple[str, Key, int]]:
        for v in self._t:
            for k in sorted(self._t[v]):
                yield v, k, self._t[v][k]

    def copy(self) -> FunctionTable:
        return FunctionTable(self._t)

    def restrict(self, keys: Iterable[tuple[str, Key]]) -> FunctionTable:
        out = FunctionTable()
        for v, k in keys:
            x = self.get(v, k)
            if x is not None:
                out.set(v, k, x)
        return out

    def __len__(self):
        return sum(len(r) for r in self._t.values())

    def __eq__(self, other):
        if not isinstance(other, FunctionTable):
            return NotImplemented
        a = {v: r for v, r in self._t.items() if r}
        b = {v: r for v, r in other._t.items() if r}
        return a == b

    def __repr__(self):
        return f"FunctionTable({len(self)} entries)"


@dataclass(frozen=True)
class LatentSpec:
    """Latent cardinalities, with optional exact distributions (uniform if absent)."""

    cards: Mapping[str, int]
    dists: Mapping[str, Sequence[Fraction]] | None = None

    def weights(self, l: str) -> list[Fraction]:
        k = self.cards[l]
        if self.dists is None or l not in self.dists:
            return [Fraction(1, k)] * k
        ws = [w if isinstance(w, Fraction) else parse_probability(w) for w in self.dists[l]]
        if len(ws) != k or any(w < 0 for w in ws) or sum(ws) != 1:
            raise InvalidDistribution(f"bad distribution for latent {l!r}: {ws}")
        return ws

    def is_uniform(self) -> bool:
        return all(len(set(self.weights(l))) == 1 for l in self.cards)


@dataclass(frozen=True)
class PossibleWorldsDiagram:
    structure: CausalStructure
    latent_cards: Mapping[str, int]
    table: FunctionTable = field(default_factory=FunctionTable)

    def layout(self) -> Layout:
        return Layout(self.structure, self.latent_cards)


@dataclass(frozen=True)
class WorldEvaluation:
    """Observation of one world; ``None`` marks visibles that could not be evaluated."""

    outcome: tuple[int | None, ...]
    blocked: tuple[str, Key] | None

    @property
    def complete(self) -> bool:
        return self.blocked is None


class Layout:
    """Index-level view of a structure at fixed latent cardinalities.

    Visible positions follow the structure's declaration order (the outcome
    order); ``order`` lists them topologically for evaluation.
    """

    def __init__(self, structure: CausalStructure, latent_cards: Mapping[str, int] | Sequence[int]):
        self.structure = structure
        self.visible = structure.visible
        self.latent = structure.latent
        for l in self.latent:
            if structure.graph.parents(l):
                raise LatentNotExogenous(f"latent {l!r} has parents; normalize the structure first")
        if isinstance(latent_cards, Mapping):
            missing = set(self.latent) - set(latent_cards)
            if missing:
                raise VariableMismatch(f"no cardinality for latents {sorted(missing)}")
            self.kl = tuple(int(latent_cards[l]) for l in self.latent)
        else:
            self.kl = tuple(int(k) for k in latent_cards)
            if len(self.kl) != len(self.latent):
                raise VariableMismatch("one cardinality per latent is required")
        if any(k < 1 for k in self.kl):
            raise ValueError("latent cardinalities must be >= 1")
        self.vcards = structure.visible_cards
        vpos = {v: i for i, v in enumerate(self.visible)}
        lpos = {l: i for i, l in enumerate(self.latent)}
        self.order = tuple(vpos[v] for v in structure.visible_topo)
        self.vpa = tuple(tuple(vpos[u] for u in structure.ordered_vpa(v)) for v in self.visible)
        self.lpa = tuple(tuple(lpos[l] for l in structure.ordered_lpa(v)) for v in self.visible)
        self.n_worlds = prod(self.kl)
        self.worlds = list(itertools.product(*(range(k) for k in self.kl)))
        self.n_outcomes = prod(self.vcards)

    def latent_card_map(self) -> dict[str, int]:
        return dict(zip(self.latent, self.kl))

    def key(self, v: int, vals: Sequence[int], lam: Sequence[int]) -> Key:
        return tuple(vals[u] for u in self.vpa[v]) + tuple(lam[j] for j in self.lpa[v])

    def all_keys(self, v: int) -> list[Key]:
        ranges = [range(self.vcards[u]) for u in self.vpa[v]] + [range(self.kl[j]) for j in self.lpa[v]]
        return list(itertools.product(*ranges))

    def world_index(self, lam: Sequence[int]) -> int:
        i = 0
        for x, k in zip(lam, self.kl):
            i = i * k + x
        return i

    def outcome_index(self, outcome: Sequence[int]) -> int:
        i = 0
        for x, k in zip(outcome, self.vcards):
            i = i * k + x
        return i

    def evaluate(self, table: FunctionTable, lam: Sequence[int]) -> WorldEvaluation:
        vals: list[int | None] = [None] * len(self.visible)
        blocked = None
        for v in self.order:
            if any(vals[u] is None for u in self.vpa[v]):
                continue
            key = self.key(v, vals, lam)
            x = table.get(self.visible[v], key)
            if x is None:
                if blocked is None:
                    blocked = (self.visible[v], key)
                continue
            vals[v] = x
        return WorldEvaluation(tuple(vals), blocked)

    def queried_keys(self, table: FunctionTable, lam: Sequence[int]) -> list[tuple[str, Key]]:
        """Keys looked up while evaluating one world, blocked lookups included."""
        vals: list[int | None] = [None] * len(self.visible)
        out = []
        for v in self.order:
            if any(vals[u] is None for u in self.vpa[v]):
                continue
            key = self.key(v, vals, lam)
            out.append((self.visible[v], key))
            vals[v] = table.get(self.visible[v], key)
        return out

    def observations(self, table: FunctionTable) -> list[tuple[int, ...]]:
        """Observation of every world in lexicographic latent order."""
        out = []
        blocking = set()
        for lam in self.worlds:
            ev = self.evaluate(table, lam)
            if ev.blocked is not None:
                blocking.add(ev.blocked)
            else:
                out.append(ev.outcome)
        if blocking:
            raise IncompleteTable(blocking)
        return out


def evaluate_world(diagram: PossibleWorldsDiagram, lam: Sequence[int]) -> WorldEvaluation:
    layout = diagram.layout()
    if len(lam) != len(layout.kl) or any(not 0 <= x < k for x, k in zip(lam, layout.kl)):
        raise ValueError(f"latent valuation {tuple(lam)} out of range for {layout.kl}")
    return layout.evaluate(diagram.table, lam)


def reachable_keys(diagram: PossibleWorldsDiagram) -> set[tuple[str, Key]]:
    """Table keys that some world actually queries; every other entry is superfluous."""
    layout = diagram.layout()
    out: set[tuple[str, Key]] = set()
    for lam in layout.worlds:
        out.update(layout.queried_keys(diagram.table, lam))
    return out


def simulate(structure: CausalStructure, table: FunctionTable, latent_spec: LatentSpec) -> Distribution:
    """Observed distribution: the weighted mixture of world observations."""
    layout = Layout(structure, latent_spec.cards)
    weights = [latent_spec.weights(l) for l in layout.latent]
    obs = layout.observations(table)
    acc: dict[tuple[int, ...], Fraction] = {}
    for lam, x in zip(layout.worlds, obs):
        w = Fraction(1)
        for j, val in enumerate(lam):
            w *= weights[j][val]
        if w:
            acc[x] = acc.get(x, Fraction(0)) + w
    return Distribution(layout.visible, layout.vcards, acc, check=False)


def simulate_counts(layout: Layout, table: FunctionTable) -> tuple[int, ...]:
    """Dense world counts per visible outcome (uniform latents, denominator ∏k_ℓ)."""
    counts = [0] * layout.n_outcomes
    for x in layout.observations(table):
        counts[layout.outcome_index(x)] += 1
    return tuple(counts)


def _check_perms(layout: Layout, perm: Mapping[str, Sequence[int]]) -> list[tuple[int, ...]]:
    out = []
    for l, k in zip(layout.latent, layout.kl):
        p = tuple(perm.get(l, range(k)))
        if sorted(p) != list(range(k)):
            raise NotABijection(f"permutation for {l!r} is not a bijection of 0..{k - 1}: {p}")
        out.append(p)
    return out


def apply_latent_permutation(diagram: PossibleWorldsDiagram,
                             perm: Mapping[str, Sequence[int]]) -> PossibleWorldsDiagram:
    """Relabel latent values: ``perm[l][old] = new``. Latents not listed stay fixed."""
    layout = diagram.layout()
    perms = _check_perms(layout, perm)
    vidx = {v: i for i, v in enumerate(layout.visible)}
    out = FunctionTable()
    for v, key, x in diagram.table.entries():
        i = vidx[v]
        nv = len(layout.vpa[i])
        lat = tuple(perms[j][key[nv + t]] for t, j in enumerate(layout.lpa[i]))
        out.set(v, key[:nv] + lat, x)
    return PossibleWorldsDiagram(diagram.structure, dict(diagram.latent_cards), out)


def latent_permutations(kl: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    return itertools.product(*(itertools.permutations(range(k)) for k in kl))


def world_permutation(layout: Layout, perms: Sequence[Sequence[int]]) -> list[int]:
    """``w -> index of π(λ_w)`` for a tuple of per-latent permutations."""
    return [layout.world_index([perms[j][x] for j, x in enumerate(lam)]) for lam in layout.worlds]


def orbit_size(kl: Sequence[int]) -> int:
    return prod(factorial(k) for k in kl)


def canonical_form(diagram: PossibleWorldsDiagram, cap: int = DEFAULT_ORBIT_CAP) -> PossibleWorldsDiagram:
    """Orbit representative under latent relabelings.

    The table is first restricted to its reachable keys. Among all images,
    the one whose world-observation sequence (lexicographic in λ) is
    smallest is returned; since a reachable table is determined by its
    world observations, the representative is unique.
    """
    layout = diagram.layout()
    size = orbit_size(layout.kl)
    if size > cap:
        raise OrbitTooLarge(f"orbit size {size} exceeds cap {cap}")
    obs = [layout.outcome_index(x) for x in layout.observations(diagram.table)]
    best, best_perm = None, None
    for perms in latent_permutations(layout.kl):
        image = world_permutation(layout, perms)
        enc = [0] * len(obs)
        for w, code in enumerate(obs):
            enc[image[w]] = code
        enc = tuple(enc)
        if best is None or enc < best:
            best, best_perm = enc, perms
    reach = reachable_keys(diagram)
    trimmed = PossibleWorldsDiagram(diagram.structure, dict(diagram.latent_cards),
                                    diagram.table.restrict(reach))
    return apply_latent_permutation(trimmed, dict(zip(layout.latent, best_perm)))


def prefix_is_canonical(codes: Sequence[int], images: Sequence[Sequence[int]]) -> bool:
    """Whether a known prefix of world codes can still be orbit-minimal.

    ``images`` holds, for each non-identity relabeling, the inverse world map
    (position ``i`` of the image reads world ``images[π][i]``). Returns False
    only when some relabeling is already strictly smaller on the known part,
    so no completion of the prefix can be the representative.
    """
    n = len(codes)
    for inv in images:
        for i in range(n):
            src = inv[i]
            if src >= n:
                break
            a, b = codes[src], codes[i]
            if a < b:
                return False
            if a > b:
                break
    return True
