"""Boolean encoding of the support question, DIMACS output, and a small DPLL solver.

Variables are ``O[v, λ]`` (value of ``v`` in world ``λ``), numbered world by
world with visibles in topological order, followed by ``F[v, key]`` (table
entries), numbered visible by visible in the same order with keys in
lexicographic order. The encoding lives at latent cardinality ``|σ|`` with
the same diagonal pinning as :func:`decide_support`, so the two agree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import NonBooleanVisible
from .possibilistic import prepare, support_events
from .prob import Support
from .structure import CausalStructure
from .worlds import Layout


@dataclass(frozen=True)
class CnfDocument:
    nvars: int
    clauses: tuple[tuple[int, ...], ...]
    legend: tuple[tuple[int, str, str, tuple[int, ...]], ...]
    """``(id, "O" | "F", visible, world or key)`` for every variable."""

    def to_dimacs(self) -> str:
        lines = []
        for var, kind, v, where in self.legend:
            lines.append(f"c {var} {kind} {v} {','.join(map(str, where)) or '-'}")
        lines.append(f"p cnf {self.nvars} {len(self.clauses)}")
        for c in self.clauses:
            lines.append(" ".join(map(str, c)) + " 0")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CnfResult:
    satisfiable: bool
    assignment: tuple[bool, ...] | None = None
    """``assignment[i - 1]`` is the value of variable ``i``."""

    def __bool__(self):
        return self.satisfiable


def export_cnf(structure: CausalStructure, sigma: Support) -> CnfDocument:
    normal, _ = prepare(structure)
    bad = [v for v, k in zip(normal.visible, normal.visible_cards) if k != 2]
    if bad:
        raise NonBooleanVisible(f"CNF export needs binary visibles; not binary: {bad}")
    events = support_events(normal, sigma)
    W = len(events)
    layout = Layout(normal, {l: W for l in normal.latent})
    legend = []
    obs = {}
    for w, lam in enumerate(layout.worlds):
        for v in layout.order:
            obs[(v, w)] = len(legend) + 1
            legend.append((len(legend) + 1, "O", layout.visible[v], lam))
    ent = {}
    for v in layout.order:
        for key in layout.all_keys(v):
            ent[(v, key)] = len(legend) + 1
            legend.append((len(legend) + 1, "F", layout.visible[v], key))

    def differs(var, bit):
        # literal that is true iff the variable differs from ``bit``
        return -var if bit else var

    clauses: list[tuple[int, ...]] = []
    for w, lam in enumerate(layout.worlds):
        for v in layout.order:
            parents = layout.vpa[v]
            o = obs[(v, w)]
            for p in itertools.product((0, 1), repeat=len(parents)):
                guard = [differs(obs[(u, w)], bit) for u, bit in zip(parents, p)]
                key = tuple(p) + tuple(lam[j] for j in layout.lpa[v])
                f = ent[(v, key)]
                clauses.append(tuple(guard + [-o, f]))
                clauses.append(tuple(guard + [o, -f]))
    for i, e in enumerate(events):
        w = layout.world_index([i] * len(layout.kl))
        for v in layout.order:
            clauses.append((obs[(v, w)] if e[v] else -obs[(v, w)],))
    allowed = set(events)
    outside = [x for x in itertools.product((0, 1), repeat=len(layout.visible)) if x not in allowed]
    for w in range(layout.n_worlds):
        for x in outside:
            clauses.append(tuple(differs(obs[(v, w)], x[v]) for v in layout.order))
    return CnfDocument(len(legend), tuple(clauses), tuple(legend))


def parse_dimacs(text: str) -> CnfDocument:
    """Read the clause part of a DIMACS file (legend comments are kept if well-formed)."""
    nvars = None
    clauses = []
    legend = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 5 and parts[2] in ("O", "F"):
                where = () if parts[4] == "-" else tuple(int(t) for t in parts[4].split(","))
                legend.append((int(parts[1]), parts[2], parts[3], where))
            continue
        if line.startswith("p"):
            nvars = int(line.split()[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if nvars is None:
        nvars = max((abs(l) for c in clauses for l in c), default=0)
    return CnfDocument(nvars, tuple(clauses), tuple(legend))


def solve_cnf(doc: CnfDocument | Sequence[Sequence[int]], nvars: int | None = None) -> CnfResult:
    """Complete DPLL search with two-watched-literal unit propagation."""
    if isinstance(doc, CnfDocument):
        nvars, raw = doc.nvars, doc.clauses
    else:
        raw = doc
        if nvars is None:
            nvars = max((abs(l) for c in raw for l in c), default=0)
    clauses: list[list[int]] = []
    for c in raw:
        lits = list(dict.fromkeys(c))
        if any(-l in lits for l in lits):
            continue
        if not lits:
            return CnfResult(False)
        clauses.append(lits)

    value = [0] * (nvars + 1)  # 1 true, -1 false, 0 free
    trail: list[int] = []
    watches: dict[int, list[int]] = {}
    units = []
    for ci, c in enumerate(clauses):
        if len(c) == 1:
            units.append(c[0])
        else:
            watches.setdefault(c[0], []).append(ci)
            watches.setdefault(c[1], []).append(ci)

    def lit_value(l):
        a = value[abs(l)]
        return a if l > 0 else -a

    def enqueue(l) -> bool:
        cur = lit_value(l)
        if cur:
            return cur == 1
        value[abs(l)] = 1 if l > 0 else -1
        trail.append(l)
        return True

    def propagate(head: int) -> bool:
        while head < len(trail):
            false_lit = -trail[head]
            head += 1
            watching = watches.get(false_lit, [])
            keep = []
            ok = True
            for n, ci in enumerate(watching):
                if not ok:
                    keep.append(ci)
                    continue
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if lit_value(c[0]) == 1:
                    keep.append(ci)
                    continue
                for k in range(2, len(c)):
                    if lit_value(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        watches.setdefault(c[1], []).append(ci)
                        break
                else:
                    keep.append(ci)
                    if not enqueue(c[0]):
                        ok = False
            watches[false_lit] = keep
            if not ok:
                return False
        return True

    for u in units:
        if not enqueue(u):
            return CnfResult(False)
    if not propagate(0):
        return CnfResult(False)

    decisions: list[tuple[int, int, bool]] = []  # (trail length, literal, flipped)
    next_var = 1
    while True:
        while next_var <= nvars and value[next_var]:
            next_var += 1
        if next_var > nvars:
            return CnfResult(True, tuple(value[i] == 1 for i in range(1, nvars + 1)))
        mark = len(trail)
        decisions.append((mark, next_var, False))
        enqueue(next_var)
        ok = propagate(mark)
        while not ok:
            # undo to the latest decision that still has an untried polarity
            while decisions and decisions[-1][2]:
                decisions.pop()
            if not decisions:
                return CnfResult(False)
            mark, lit, _ = decisions.pop()
            for l in trail[mark:]:
                value[abs(l)] = 0
            del trail[mark:]
            decisions.append((mark, -lit, True))
            enqueue(-lit)
            ok = propagate(mark)
        next_var = 1
