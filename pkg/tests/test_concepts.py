import pytest
from hypothesis import given, settings, strategies as st

from discourse_fca.concepts import (
    IcebergParams,
    canonical_key,
    concept_count_grid,
    covering_edges,
    enumerate_concepts,
    iceberg_filter,
)
from discourse_fca.context import FormalContext, is_concept
from discourse_fca.errors import ConceptLimitExceeded, LatticeError

from conftest import contexts
from oracles import brute_concepts


def as_sets(concepts):
    def bits(v):
        return frozenset(i for i in range(v.bit_length()) if v >> i & 1)
    return {(bits(c.extent), bits(c.intent)) for c in concepts}


def test_c3_concepts(c3):
    got = enumerate_concepts(c3)
    assert [(c3.obj_labels(c.extent), c3.attr_names(c.intent)) for c in got] == [
        (("g1", "g2", "g3"), ("a",)),
        (("g1", "g3"), ("a", "b")),
        (("g2", "g3"), ("a", "c")),
        (("g3",), ("a", "b", "c")),
    ]
    assert as_sets(got) == brute_concepts(c3)


def test_all_ones_context_has_one_concept():
    ctx = FormalContext.from_matrix([[1, 1, 1], [1, 1, 1]])
    (c,) = enumerate_concepts(ctx)
    assert c.extent == ctx.all_objects and c.intent == ctx.all_attributes


def test_identity_context_has_five_concepts(identity3):
    got = enumerate_concepts(identity3)
    assert len(got) == 5
    assert as_sets(got) == brute_concepts(identity3)
    assert got[0].intent == 0 and got[0].extent == identity3.all_objects
    assert got[-1].extent == 0 and got[-1].intent == identity3.all_attributes


def test_concept_support_is_exact_fraction(c3):
    c = enumerate_concepts(c3)[1]
    assert c.support == 2 / 3


@pytest.mark.parametrize(
    "params, expected",
    [
        ((0.5, 2), [("a", "b"), ("a", "c")]),
        ((0.0, 0), [("a",), ("a", "b"), ("a", "c"), ("a", "b", "c")]),
        ((1.0, 1), [("a",)]),
    ],
)
def test_iceberg_filter_c3(c3, params, expected):
    kept = iceberg_filter(enumerate_concepts(c3), IcebergParams(*params))
    assert [c3.attr_names(c.intent) for c in kept] == expected


def test_iceberg_params_validation():
    with pytest.raises(ValueError):
        IcebergParams(1.5, 3)
    with pytest.raises(ValueError):
        IcebergParams(0.2, -1)


def test_iceberg_support_boundary_is_inclusive():
    # 1 of 5 objects; 1/5 == 0.2 must survive min_support 0.2
    ctx = FormalContext.from_matrix([[1, 1, 1]] + [[0, 0, 0]] * 4)
    kept = iceberg_filter(enumerate_concepts(ctx), IcebergParams(0.2, 3))
    assert len(kept) == 1


def test_grid_c3(c3):
    grid = concept_count_grid(c3, [0.5, 1.0], [0, 2])
    got = {(g.min_support, g.min_intent_size): g.filtered_count for g in grid}
    assert got == {(0.5, 0): 3, (0.5, 2): 2, (1.0, 0): 1, (1.0, 2): 0}
    assert {g.raw_count for g in grid} == {4}


def test_grid_rejects_empty_lists(c3):
    with pytest.raises(ValueError):
        concept_count_grid(c3, [], [1])


def test_covering_edges_c3(c3):
    concepts = enumerate_concepts(c3)
    assert covering_edges(concepts) == [(0, 1), (0, 2), (1, 3), (2, 3)]


def test_covering_edges_single_concept():
    ctx = FormalContext.from_matrix([[1, 1]])
    assert covering_edges(enumerate_concepts(ctx)) == []


def test_covering_edges_identity(identity3):
    edges = covering_edges(enumerate_concepts(identity3))
    assert len(edges) == 6
    assert edges == [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]


def test_covering_edges_rejects_incomplete_sets(c3):
    concepts = enumerate_concepts(c3)
    with pytest.raises(LatticeError):
        covering_edges(concepts + [concepts[1]])
    with pytest.raises(LatticeError):
        covering_edges(concepts[1:3])


def test_concept_cap_raises():
    ctx = FormalContext.from_matrix([[int(i != j) for j in range(8)] for i in range(8)])
    assert len(enumerate_concepts(ctx)) == 256
    with pytest.raises(ConceptLimitExceeded):
        enumerate_concepts(ctx, max_concepts=100)


def test_parallel_enumeration_matches_serial():
    ctx = FormalContext.from_matrix([[(i * 7 + j * 3) % 5 < 2 for j in range(9)] for i in range(14)])
    assert enumerate_concepts(ctx, workers=2) == enumerate_concepts(ctx)


@settings(max_examples=150, deadline=None)
@given(contexts(max_objects=10, max_attributes=8))
def test_enumeration_matches_oracle(ctx):
    got = enumerate_concepts(ctx)
    assert as_sets(got) == brute_concepts(ctx)
    assert len({c.intent for c in got}) == len(got)
    assert len({c.extent for c in got}) == len(got)
    assert all(is_concept(ctx, c.extent, c.intent) for c in got)
    assert [canonical_key(c.intent) for c in got] == sorted(canonical_key(c.intent) for c in got)


@settings(max_examples=100, deadline=None)
@given(contexts(max_objects=10, max_attributes=8),
       st.lists(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.75, 1.0]), min_size=1, max_size=4, unique=True),
       st.lists(st.integers(0, 5), min_size=1, max_size=4, unique=True))
def test_grid_is_monotone(ctx, supports, intents):
    supports, intents = sorted(supports), sorted(intents)
    grid = concept_count_grid(ctx, supports, intents)
    table = {(g.min_support, g.min_intent_size): g.filtered_count for g in grid}
    for s in supports:
        for k in intents:
            for s2 in supports:
                for k2 in intents:
                    if s2 >= s and k2 >= k:
                        assert table[s2, k2] <= table[s, k]
    assert concept_count_grid(ctx, [0.0], [0])[0].filtered_count == len(enumerate_concepts(ctx))


@settings(max_examples=100, deadline=None)
@given(contexts(max_objects=8, max_attributes=7))
def test_covering_edges_reduce_extent_order(ctx):
    concepts = enumerate_concepts(ctx)
    edges = covering_edges(concepts)
    n = len(concepts)
    reach = [[False] * n for _ in range(n)]
    for p, c in edges:
        reach[p][c] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    if reach[k][j]:
                        reach[i][j] = True
    for i in range(n):
        assert not reach[i][i]
        for j in range(n):
            if i != j:
                ei, ej = concepts[i].extent, concepts[j].extent
                assert reach[i][j] == (ej & ei == ej)
    # no edge is implied by a longer path
    for p, c in edges:
        assert not any(reach[p][m] and reach[m][c] for m in range(n))
