import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from possible_worlds import build_graph
from possible_worlds.errors import (
    CyclicGraph,
    DuplicateEdge,
    DuplicateVertex,
    UnknownEndpoint,
    UnknownVertex,
)

from scenarios import mixed_parents


def closure(n, edges):
    reach = [[False] * n for _ in range(n)]
    for q, u in edges:
        reach[q][u] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    if reach[k][j]:
                        reach[i][j] = True
    return reach


def has_cycle_dfs(n, edges):
    adj = {i: [u for q, u in edges if q == i] for i in range(n)}
    color = [0] * n

    def visit(i):
        color[i] = 1
        for u in adj[i]:
            if color[u] == 1 or (color[u] == 0 and visit(u)):
                return True
        color[i] = 2
        return False

    return any(color[i] == 0 and visit(i) for i in range(n))


@st.composite
def graphs(draw, acyclic=False, max_n=8):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(n) if (i < j if acyclic else True)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    names = [f"q{i}" for i in range(n)]
    return n, names, edges


def test_build_basics():
    g = build_graph(["a"], [])
    assert len(g) == 1 and g.edges == ()
    g = build_graph(["mu", "a", "b"], [("mu", "a"), ("a", "b")])
    assert len(g) == 3 and len(g.edges) == 2
    assert g.idx("b") == 2


def test_build_errors():
    with pytest.raises(DuplicateVertex):
        build_graph(["a", "a"], [])
    with pytest.raises(UnknownEndpoint):
        build_graph(["a"], [("a", "b")])
    with pytest.raises(DuplicateEdge):
        build_graph(["a", "b"], [("a", "b"), ("a", "b")])


def test_self_loop_is_accepted_but_cyclic():
    g = build_graph(["a"], [("a", "a")])
    assert not g.is_acyclic()
    with pytest.raises(CyclicGraph):
        g.topological_order()
    assert g.ancestors("a") == {"a"}


def test_parents_with_mixed_kinds():
    g = mixed_parents().graph
    assert g.parents("v2") == {"v1", "v4", "l1", "l2"}
    assert g.parents("v4") == frozenset()
    with pytest.raises(UnknownVertex):
        g.parents("zz")


def test_chain_ancestry():
    g = build_graph(["mu", "a", "b"], [("mu", "a"), ("a", "b")])
    assert g.ancestors({"b"}) == {"mu", "a"}
    assert g.ancestors(set()) == frozenset()
    assert g.descendants("mu") == {"a", "b"}
    sub = g.induced_subgraph({"mu", "b"})
    assert len(sub) == 2 and sub.edges == ()
    assert g.induced_subgraph(g.names) == g


def test_cycle_examples():
    cyclic = build_graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
    dag = build_graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    assert not cyclic.is_acyclic()
    assert dag.is_acyclic()
    assert dag.topological_order() == ["a", "b", "c"]


def test_topological_ties_follow_declaration():
    g = build_graph(["c", "b", "a"], [])
    assert g.topological_order() == ["c", "b", "a"]
    g = build_graph(["x", "y", "z"], [("z", "x")])
    assert g.topological_order() == ["y", "z", "x"]


@given(graphs())
def test_adjacency_matches_edge_scan(data):
    n, names, edges = data
    g = build_graph(names, [(names[q], names[u]) for q, u in edges])
    for i in range(n):
        assert g.parents(names[i]) == {names[q] for q, u in edges if u == i}
        assert g.children(names[i]) == {names[u] for q, u in edges if q == i}
        for c in g.children(names[i]):
            assert names[i] in g.parents(c)


@given(graphs())
def test_reachability_matches_closure(data):
    n, names, edges = data
    g = build_graph(names, [(names[q], names[u]) for q, u in edges])
    reach = closure(n, edges)
    for i in range(n):
        assert g.ancestors(names[i]) == {names[j] for j in range(n) if reach[j][i]}
        assert g.descendants(names[i]) == {names[j] for j in range(n) if reach[i][j]}


@given(graphs(), st.data())
def test_ancestors_disjunctive(data, draw):
    n, names, edges = data
    g = build_graph(names, [(names[q], names[u]) for q, u in edges])
    a = draw.draw(st.sets(st.sampled_from(names)))
    b = draw.draw(st.sets(st.sampled_from(names)))
    assert g.ancestors(a | b) == g.ancestors(a) | g.ancestors(b)


@given(graphs())
def test_acyclicity_matches_dfs(data):
    n, names, edges = data
    g = build_graph(names, [(names[q], names[u]) for q, u in edges])
    assert g.is_acyclic() == (not has_cycle_dfs(n, edges))


@given(graphs(acyclic=True))
def test_topological_order_properties(data):
    n, names, edges = data
    g = build_graph(names, [(names[q], names[u]) for q, u in edges])
    order = g.topological_order()
    assert sorted(order) == sorted(names)
    pos = {v: i for i, v in enumerate(order)}
    assert all(pos[names[q]] < pos[names[u]] for q, u in edges)
    for v in names:
        assert v not in g.ancestors(v)
        assert not g.ancestors(v) & g.descendants(v)


@given(graphs(), st.data())
def test_induced_subgraph_filters_edges(data, draw):
    n, names, edges = data
    g = build_graph(names, [(names[q], names[u]) for q, u in edges])
    keep = draw.draw(st.sets(st.sampled_from(names)))
    sub = g.induced_subgraph(keep)
    kept = {names.index(k) for k in keep}
    assert len(sub.edges) == sum(1 for q, u in edges if q in kept and u in kept)
    assert list(sub.names) == [v for v in names if v in keep]


def test_random_dags_seeded():
    rng = random.Random(7)
    for _ in range(50):
        n = 8
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.3]
        perm = list(range(n))
        rng.shuffle(perm)
        names = [f"v{p}" for p in perm]
        g = build_graph(names, [(names[q], names[u]) for q, u in edges])
        assert g.is_acyclic()
