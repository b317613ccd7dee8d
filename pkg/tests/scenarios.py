"""Named structures and observed data used across the test-suite."""
from fractions import Fraction

from possible_worlds import CausalStructure, Distribution, FunctionTable, Support


def binary(*names):
    return [(n, 2) for n in names]


def w_structure():
    return CausalStructure.build(binary("a", "b", "c"), ["mu", "nu"],
                                 [("mu", "a"), ("mu", "b"), ("nu", "b"), ("nu", "c")])


def instrumental():
    return CausalStructure.build(binary("a", "b", "c"), ["mu", "nu"],
                                 [("mu", "a"), ("a", "b"), ("nu", "b"), ("b", "c"), ("nu", "c")])


def bell():
    return CausalStructure.build(binary("x", "a", "b", "y"), ["mu", "nu", "rho"],
                                 [("mu", "x"), ("nu", "y"), ("rho", "a"), ("rho", "b"),
                                  ("x", "a"), ("y", "b")])


def triangle():
    return CausalStructure.build(binary("a", "b", "c"), ["mu", "nu", "rho"],
                                 [("mu", "a"), ("nu", "a"), ("mu", "b"), ("rho", "b"),
                                  ("rho", "c"), ("nu", "c")])


def evans():
    return CausalStructure.build(binary("a", "b", "c", "d"), ["mu", "nu", "rho"],
                                 [("mu", "a"), ("rho", "a"), ("a", "b"), ("nu", "b"),
                                  ("b", "c"), ("mu", "c"), ("c", "d"), ("nu", "d"), ("rho", "d")])


def chain_with_shared_noise():
    """a <- mu; b <- (a, nu); c <- (b, mu, nu), with |b| = |c| = 4."""
    return CausalStructure.build([("a", 2), ("b", 4), ("c", 4)], ["mu", "nu"],
                                 [("mu", "a"), ("a", "b"), ("nu", "b"), ("b", "c"),
                                  ("mu", "c"), ("nu", "c")])


def common_cause_pair():
    """a <- mu, b <- mu, c <- (a, b, nu), with |c| = 4."""
    return CausalStructure.build([("a", 2), ("b", 2), ("c", 4)], ["mu", "nu"],
                                 [("mu", "a"), ("mu", "b"), ("a", "c"), ("b", "c"), ("nu", "c")])


def mixed_parents():
    """v2 has visible parents v1, v4 and latent parents l1, l2."""
    return CausalStructure.build(binary("v1", "v2", "v3", "v4"), ["l1", "l2"],
                                 [("l1", "v1"), ("v1", "v2"), ("v4", "v2"), ("l1", "v2"),
                                  ("l2", "v2"), ("l2", "v3"), ("v2", "v3")])


def sup(variables, events, cards=None):
    cards = cards or [2] * len(variables)
    return Support(variables, cards, events)


W_SUPPORT = sup("abc", [(0, 0, 1), (1, 0, 0)])
INSTRUMENTAL_SUPPORT = sup("abc", [(0, 0, 0), (1, 0, 1)])
PR_EVENTS = [(0, 0, 0, 0), (0, 1, 1, 0), (0, 0, 0, 1), (0, 1, 1, 1),
             (1, 0, 0, 0), (1, 1, 1, 0), (1, 0, 1, 1), (1, 1, 0, 1)]
PR_SUPPORT = sup(["x", "a", "b", "y"], PR_EVENTS)
TRIANGLE_SUPPORT = sup("abc", [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
EVANS_SUPPORT = sup("abcd", [(0, 0, 0, 0), (1, 0, 1, 0), (0, 1, 1, 1)])
PAIR_EVENTS = [(0, 0, 2), (0, 0, 0), (1, 1, 3), (1, 1, 1)]
PAIR_SUPPORT = sup("abc", PAIR_EVENTS, [2, 2, 4])


def pr_box():
    return Distribution(["x", "a", "b", "y"], [2, 2, 2, 2], {e: Fraction(1, 8) for e in PR_EVENTS})


def pair_distribution():
    return Distribution("abc", [2, 2, 4], {e: Fraction(1, 4) for e in PAIR_EVENTS})


def chain_tables():
    return FunctionTable({
        "a": {(0,): 0, (1,): 1},
        "b": {(0, 0): 3, (0, 1): 1, (1, 0): 2, (1, 1): 0},
        "c": {(3, 0, 0): 0, (1, 0, 1): 1, (2, 1, 0): 2, (0, 1, 1): 3},
    })


def chain_distribution():
    events = [(0, 3, 0), (0, 1, 1), (1, 2, 2), (1, 0, 3)]
    return Distribution("abc", [2, 4, 4], {e: Fraction(1, 4) for e in events})


def pair_tables():
    return FunctionTable({
        "a": {(0,): 0, (1,): 1},
        "b": {(0,): 0, (1,): 1},
        "c": {(0, 0, 0): 2, (0, 0, 1): 0, (1, 1, 0): 3, (1, 1, 1): 1,
              (0, 1, 0): 0, (0, 1, 1): 1, (1, 0, 0): 2, (1, 0, 1): 3},
    })


REGRESSION = {
    "w": (w_structure, W_SUPPORT, False),
    "instrumental": (instrumental, INSTRUMENTAL_SUPPORT, False),
    "bell": (bell, PR_SUPPORT, False),
    "triangle": (triangle, TRIANGLE_SUPPORT, False),
    "evans": (evans, EVANS_SUPPORT, False),
    "pair": (common_cause_pair, PAIR_SUPPORT, True),
}
