"""Exact finite probability distributions over discrete variables.

Everything is held as :class:`fractions.Fraction`; no binary floating point
ever enters a probability. Outcomes are tuples of 0-based outcome indices in
the order of the distribution's variable list.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .errors import (
    InvalidDistribution,
    VariableMismatch,
    WeightSumNotOne,
    ZeroProbabilityEvidence,
)

Outcome = tuple[int, ...]


def parse_probability(text) -> Fraction:
    """Parse ``"n/d"`` or a decimal string exactly. Floats are rejected."""
    if isinstance(text, bool) or isinstance(text, float):
        raise InvalidDistribution(f"probabilities must be exact (string or rational), got {text!r}")
    if isinstance(text, (int, Rational)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidDistribution(f"cannot parse probability {text!r}") from None


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _check_outcome(outcome, cards):
    if len(outcome) != len(cards):
        raise InvalidDistribution(f"outcome {outcome} has arity {len(outcome)}, expected {len(cards)}")
    for x, k in zip(outcome, cards):
        if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < k:
            raise InvalidDistribution(f"outcome {outcome} out of range for cardinalities {cards}")


class Distribution:
    """A joint distribution over ``variables`` with exact rational weights.

    Zero-probability outcomes are never stored.
    """

    __slots__ = ("variables", "cards", "_p")

    def __init__(self, variables: Sequence[str], cards: Sequence[int],
                 probs: Mapping[Sequence[int], object], *, check: bool = True):
        self.variables = tuple(variables)
        self.cards = tuple(cards)
        if len(self.variables) != len(self.cards):
            raise InvalidDistribution("variables and cardinalities differ in length")
        if len(set(self.variables)) != len(self.variables):
            raise InvalidDistribution("duplicate variable names")
        p: dict[Outcome, Fraction] = {}
        for outcome, w in probs.items():
            outcome = tuple(outcome)
            w = w if isinstance(w, Fraction) else parse_probability(w)
            if check:
                _check_outcome(outcome, self.cards)
                if w < 0:
                    raise InvalidDistribution(f"negative probability at {outcome}")
            if w:
                p[outcome] = p.get(outcome, Fraction(0)) + w
        if check and sum(p.values()) != 1:
            raise InvalidDistribution(f"probabilities sum to {sum(p.values())}, not 1")
        self._p = dict(sorted(p.items()))

    @classmethod
    def from_counts(cls, variables, cards, counts: Sequence[int]) -> Distribution:
        """Distribution from a dense count vector over Ω in lexicographic order."""
        total = sum(counts)
        space = itertools.product(*(range(k) for k in cards))
        return cls(variables, cards,
                   {x: Fraction(c, total) for x, c in zip(space, counts) if c},
                   check=False)

    def __getitem__(self, outcome) -> Fraction:
        return self._p.get(tuple(outcome), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return (self.variables, self.cards, self._p) == (other.variables, other.cards, other._p)

    def __hash__(self):
        return hash((self.variables, self.cards, tuple(self._p.items())))

    def __len__(self):
        return len(self._p)

    def __repr__(self):
        terms = " + ".join(f"{format_fraction(w)}{list(x)}" for x, w in self._p.items())
        return f"Distribution({','.join(self.variables)}: {terms})"

    def items(self):
        return self._p.items()

    def outcomes(self) -> list[Outcome]:
        return list(self._p)

    def space(self):
        return itertools.product(*(range(k) for k in self.cards))

    def dense(self) -> list[Fraction]:
        return [self[x] for x in self.space()]

    def reorder(self, variables: Sequence[str]) -> Distribution:
        """Same distribution with variables permuted into ``variables`` order."""
        if sorted(variables) != sorted(self.variables):
            raise VariableMismatch(f"cannot reorder {self.variables} as {tuple(variables)}")
        pos = [self.variables.index(v) for v in variables]
        cards = [self.cards[i] for i in pos]
        return Distribution(variables, cards,
                            {tuple(x[i] for i in pos): w for x, w in self._p.items()},
                            check=False)


@dataclass(frozen=True)
class Support:
    """The set of possible events of a distribution."""

    variables: tuple[str, ...]
    cards: tuple[int, ...]
    events: tuple[Outcome, ...]

    def __init__(self, variables: Sequence[str], cards: Sequence[int], events: Iterable[Sequence[int]]):
        object.__setattr__(self, "variables", tuple(variables))
        object.__setattr__(self, "cards", tuple(cards))
        evs = sorted({tuple(e) for e in events})
        for e in evs:
            _check_outcome(e, self.cards)
        object.__setattr__(self, "events", tuple(evs))

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __contains__(self, outcome):
        return tuple(outcome) in set(self.events)

    def as_set(self) -> frozenset[Outcome]:
        return frozenset(self.events)

    def reorder(self, variables: Sequence[str]) -> Support:
        if sorted(variables) != sorted(self.variables):
            raise VariableMismatch(f"cannot reorder {self.variables} as {tuple(variables)}")
        pos = [self.variables.index(v) for v in variables]
        return Support(variables, [self.cards[i] for i in pos],
                       [tuple(e[i] for i in pos) for e in self.events])


def point_mass(variables: Sequence[str], cards: Sequence[int], outcome: Sequence[int]) -> Distribution:
    return Distribution(variables, cards, {tuple(outcome): Fraction(1)})


def mixture(components: Iterable[tuple[object, Distribution]]) -> Distribution:
    """Exact convex combination ``Σ w_i P_i`` of distributions on one space."""
    components = [(parse_probability(w) if not isinstance(w, Fraction) else w, d) for w, d in components]
    if not components:
        raise WeightSumNotOne("empty mixture")
    head = components[0][1]
    total = Fraction(0)
    acc: dict[Outcome, Fraction] = {}
    for w, d in components:
        if (d.variables, d.cards) != (head.variables, head.cards):
            raise VariableMismatch("mixture components live on different spaces")
        if w < 0:
            raise WeightSumNotOne(f"negative mixture weight {w}")
        total += w
        for x, p in d.items():
            acc[x] = acc.get(x, Fraction(0)) + w * p
    if total != 1:
        raise WeightSumNotOne(f"mixture weights sum to {total}")
    return Distribution(head.variables, head.cards, acc, check=False)


def support(p: Distribution) -> Support:
    return Support(p.variables, p.cards, p.outcomes())


def _same_space(p: Distribution, q: Distribution):
    if (p.variables, p.cards) != (q.variables, q.cards):
        raise VariableMismatch(
            f"distributions live on different spaces: {p.variables}{p.cards} vs {q.variables}{q.cards}"
        )


def distance(p: Distribution, q: Distribution) -> Fraction:
    """L1 distance ``Σ_x |P(x) − Q(x)|``."""
    _same_space(p, q)
    keys = set(p.outcomes()) | set(q.outcomes())
    return sum((abs(p[x] - q[x]) for x in keys), Fraction(0))


def marginalize(p: Distribution, keep: Iterable[str]) -> Distribution:
    """Marginal on ``keep``; variables stay in their original relative order."""
    keep = set(keep)
    missing = keep - set(p.variables)
    if missing:
        raise VariableMismatch(f"unknown variables {sorted(missing)}")
    pos = [i for i, v in enumerate(p.variables) if v in keep]
    acc: dict[Outcome, Fraction] = {}
    for x, w in p.items():
        y = tuple(x[i] for i in pos)
        acc[y] = acc.get(y, Fraction(0)) + w
    return Distribution([p.variables[i] for i in pos], [p.cards[i] for i in pos], acc, check=False)


def condition(p: Distribution, evidence: Mapping[str, int]) -> Distribution:
    """Renormalized distribution of the remaining variables given ``evidence``."""
    unknown = set(evidence) - set(p.variables)
    if unknown:
        raise VariableMismatch(f"unknown evidence variables {sorted(unknown)}")
    fixed = {p.variables.index(v): x for v, x in evidence.items()}
    rest = [i for i in range(len(p.variables)) if i not in fixed]
    acc: dict[Outcome, Fraction] = {}
    for x, w in p.items():
        if all(x[i] == val for i, val in fixed.items()):
            y = tuple(x[i] for i in rest)
            acc[y] = acc.get(y, Fraction(0)) + w
    mass = sum(acc.values(), Fraction(0))
    if mass == 0:
        raise ZeroProbabilityEvidence(f"evidence {dict(evidence)} has probability zero")
    return Distribution([p.variables[i] for i in rest], [p.cards[i] for i in rest],
                        {y: w / mass for y, w in acc.items()}, check=False)


def _weights(p) -> list[Fraction]:
    if isinstance(p, Distribution):
        if len(p.variables) != 1:
            raise VariableMismatch("expected a distribution over a single variable")
        return p.dense()
    ws = [w if isinstance(w, Fraction) else parse_probability(w) for w in p]
    if any(w < 0 for w in ws) or sum(ws) != 1:
        raise InvalidDistribution(f"not a probability vector: {ws}")
    return ws


def inverse_sample_map(p, m: int) -> list[int]:
    """Deterministic map from ``m`` uniform outcomes onto the support of ``p``.

    Outcome ``ω`` (0-based) goes to the first ``λ`` whose cumulative weight
    satisfies ``m·cum(λ) ≥ ω + 1/2``; i.e. cumulative counts are rounded to
    the nearest integer, which keeps every induced count within 1 of its
    target and the two extreme counts within 1/2.
    """
    ws = _weights(p)
    if m < 1:
        raise ValueError("m must be >= 1")
    g = []
    cum = Fraction(0)
    lam = 0
    thresholds = []
    for w in ws:
        cum += w
        thresholds.append(cum * m)
    for omega in range(m):
        target = omega + Fraction(1, 2)
        while thresholds[lam] < target:
            lam += 1
        g.append(lam)
    return g


def rational_approximation(p, m: int):
    """Distribution induced by pushing the uniform law on ``m`` points through
    :func:`inverse_sample_map`. Its L1 distance to ``p`` is at most
    ``(|Ω|−1)/m``; the bound is asserted.
    """
    ws = _weights(p)
    g = inverse_sample_map(ws, m)
    counts = [0] * len(ws)
    for lam in g:
        counts[lam] += 1
    approx = [Fraction(c, m) for c in counts]
    gap = sum((abs(a - b) for a, b in zip(ws, approx)), Fraction(0))
    assert gap <= Fraction(len(ws) - 1, m), (ws, m, gap)
    if isinstance(p, Distribution):
        return Distribution(p.variables, p.cards,
                            {(i,): w for i, w in enumerate(approx)}, check=False)
    return approx


@dataclass(frozen=True)
class EpsilonBound:
    L: int
    C: int
    K: int
    epsilon: Fraction


def epsilon_bound(L: int, C: int, K: int) -> EpsilonBound:
    """``ε = Σ_{n=1}^{L} (1/n!)·(L(C−1)/K)^n`` as an exact rational."""
    if min(L, C, K) < 1:
        raise ValueError("L, C and K must all be >= 1")
    x = Fraction(L * (C - 1), K)
    eps = sum((x ** n / factorial(n) for n in range(1, L + 1)), Fraction(0))
    return EpsilonBound(L, C, K, eps)


def product_distribution(factors: Sequence[Distribution]) -> Distribution:
    """Independent joint of distributions on disjoint variable sets."""
    variables = [v for f in factors for v in f.variables]
    cards = [k for f in factors for k in f.cards]
    acc = {}
    for combo in itertools.product(*(list(f.items()) for f in factors)):
        x = tuple(i for o, _ in combo for i in o)
        acc[x] = prod((w for _, w in combo), start=Fraction(1))
    return Distribution(variables, cards, acc, check=False)
