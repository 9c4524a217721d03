"""
resolving_service 測試：等價類、DRS、貪婪 k-DRS、DMD
"""
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from services.errors import ConfigError, DomainError
from services.graph_service import all_pairs_shortest_paths, build_generator_spec, generate
from services.resolving_service import (
    approx_dmd,
    class_count,
    equivalence_classes,
    exact_dmd,
    greedy_k_drs,
    is_drs,
)


def small_graph(seed: int, n: int = 9):
    graph = generate(build_generator_spec(model="er", n=n, p=0.35, seed=seed))
    return graph, all_pairs_shortest_paths(graph)


# ==================== 等價類 ====================

def test_single_witness_resolves_nothing(p3):
    _, D = p3
    assert equivalence_classes(D, [0]).classes == ((0, 1, 2),)


def test_endpoints_resolve_p3(p3):
    _, D = p3
    partition = equivalence_classes(D, [0, 2])
    assert partition.num_classes == 3
    assert partition.class_of(1) == (1,)


def test_adjacent_witnesses_on_p3(p3):
    _, D = p3
    assert equivalence_classes(D, [0, 1]).classes == ((0,), (1, 2))


def test_empty_witness_set(p3):
    _, D = p3
    with pytest.raises(DomainError):
        equivalence_classes(D, [])


def test_is_drs(p3, star):
    _, D3 = p3
    _, Ds = star
    assert is_drs(D3, [0, 2])
    assert not is_drs(D3, [0, 1])
    assert not is_drs(D3, [0])
    assert is_drs(Ds, [1, 2, 3])


def anchored_partition(D, witnesses, anchor):
    signature = D.quantized()[:, witnesses] - D.quantized()[:, [anchor]]
    groups = {}
    for v, row in enumerate(map(tuple, signature)):
        groups.setdefault(row, []).append(v)
    return sorted(tuple(g) for g in groups.values())


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=500), data=st.data())
def test_partition_does_not_depend_on_anchor(seed, data):
    _, D = small_graph(seed)
    witnesses = sorted(data.draw(st.sets(st.integers(0, D.n - 1), min_size=1, max_size=D.n)))
    expected = list(equivalence_classes(D, witnesses).classes)
    for anchor in witnesses:
        assert anchored_partition(D, witnesses, anchor) == expected


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=500), data=st.data())
def test_adding_a_witness_never_merges_classes(seed, data):
    _, D = small_graph(seed)
    witnesses = data.draw(st.sets(st.integers(0, D.n - 1), min_size=1, max_size=D.n))
    extra = data.draw(st.integers(0, D.n - 1))
    assert class_count(D, witnesses | {extra}) >= class_count(D, witnesses)


# ==================== 貪婪 k-DRS ====================

def test_greedy_p3(p3):
    _, D = p3
    assert greedy_k_drs(D, 2) == (0, 2)


def test_greedy_star_picks_leaves(star):
    _, D = star
    chosen = greedy_k_drs(D, 3)
    assert chosen == (1, 2, 3)
    assert class_count(D, chosen) == 4


def test_greedy_full_set_is_drs():
    _, D = small_graph(3)
    assert class_count(D, greedy_k_drs(D, D.n)) == D.n


@pytest.mark.parametrize("k", [1, 4])
def test_greedy_k_out_of_range(p3, k):
    _, D = p3
    with pytest.raises(ConfigError):
        greedy_k_drs(D, k)


def test_greedy_is_the_same_with_threads():
    _, D = small_graph(17, n=12)
    assert greedy_k_drs(D, 4) == greedy_k_drs(D, 4, max_workers=4)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=500))
def test_greedy_class_count_non_decreasing_in_k(seed):
    _, D = small_graph(seed)
    counts = [class_count(D, greedy_k_drs(D, k)) for k in range(2, D.n + 1)]
    assert counts == sorted(counts)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=500))
def test_greedy_beats_every_pair_at_k2(seed):
    _, D = small_graph(seed, n=7)
    best = max(class_count(D, [u, v]) for u in range(D.n) for v in range(u + 1, D.n))
    assert class_count(D, greedy_k_drs(D, 2)) == best


# ==================== DMD ====================

def test_dmd_examples(p3, star, c4):
    assert approx_dmd(p3[1]) == 2
    assert approx_dmd(star[1]) == 3
    assert exact_dmd(c4[1]) == 3
    assert 2 <= approx_dmd(c4[1]) <= 3


def test_exact_dmd_refuses_large_graphs():
    _, D = small_graph(1, n=14)
    with pytest.raises(ConfigError):
        exact_dmd(D)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(min_value=0, max_value=500), n=st.integers(min_value=3, max_value=9))
def test_greedy_dmd_is_an_upper_bound(seed, n):
    _, D = small_graph(seed, n=n)
    exact = exact_dmd(D)
    assert approx_dmd(D) >= exact
    optimum = [s for s in combinations(range(D.n), exact) if is_drs(D, s)]
    assert optimum
    assert not any(is_drs(D, s) for s in combinations(range(D.n), exact - 1))
