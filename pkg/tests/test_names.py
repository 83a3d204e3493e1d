from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from finsheaf.category import chain, discrete_category
from finsheaf.coverage import dense_topology, trivial_topology
from finsheaf.errors import CarrierTooLarge, RootMismatch, UnknownLiteral
from finsheaf.names import build_universe, names_equiv

from helpers import all_topologies, small_categories

POINT = trivial_topology(discrete_category(1))
C2 = chain(2)
U_ARROW = C2.arrow("0<=1")
ID1 = C2.identity[1]
SITES = [t for c in small_categories() if c.n_arrows <= 3 for t in all_topologies(c)]


def hereditarily_finite(k: int) -> list[frozenset]:
    """V_k: sets all of whose members lie in V_{k-1}; V_0 = ∅."""
    level: list[frozenset] = []
    for _ in range(k):
        level = [frozenset(s) for r in range(len(level) + 1) for s in itertools.combinations(level, r)]
    return level


def decode(U, i: int) -> frozenset:
    """The hereditarily finite set a name denotes over the one-object trivial site."""
    ident = U.cat.identity[0]
    return frozenset(decode(U, m) for m in U.names[i].members(ident))


def empty_name(U, c: int) -> int:
    return U.name_of(c, {})


@pytest.mark.parametrize("k,count", [(1, 1), (2, 2), (3, 4), (4, 16)])
def test_point_universe_counts(k, count):
    assert len(hereditarily_finite(k)) == count
    U = build_universe(POINT, k)
    assert U.carrier_sizes() == {"*": count}


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_point_universe_is_the_hereditarily_finite_sets(k):
    U = build_universe(POINT, k)
    reps = U.quantifier_range(0)
    sets = {i: decode(U, i) for i in reps}
    assert sorted(map(sorted_repr, sets.values())) == sorted(map(sorted_repr, hereditarily_finite(k)))
    for i, j in itertools.product(reps, repeat=2):
        assert U.mem(i, j) == (sets[i] in sets[j])
    # brute bisimulation over all names, not just representatives
    for i, j in itertools.product(U.by_object[0], repeat=2):
        assert U.equiv(i, j) == (decode(U, i) == decode(U, j))


def sorted_repr(s: frozenset) -> str:
    return "{" + ",".join(sorted(map(sorted_repr, s))) + "}"


def test_simple_equivalences_on_the_point():
    U = build_universe(POINT, 2)
    e = empty_name(U, 0)
    one = U.name_of(0, {0: [e]})
    assert names_equiv(U, e, e)
    assert not names_equiv(U, e, one)
    assert U.mem(e, one) and not U.mem(one, e)


def test_pairing_witness_contains_exactly_its_entries():
    U = build_universe(POINT, 3)
    a = empty_name(U, 0)
    b = U.name_of(0, {0: [a]})
    pair = U.name_of(0, {0: [a, b]})
    assert [i for i in U.quantifier_range(0) if U.mem(i, pair)] == [a, b]


def test_entry_along_u_is_enough_under_the_dense_topology():
    for top, expected in ((dense_topology(C2), True), (trivial_topology(C2), False)):
        U = build_universe(top, 2)
        e0, e1 = empty_name(U, 0), empty_name(U, 1)
        along_u = U.name_of(1, {U_ARROW: [e0]})
        with_id = U.name_of(1, {ID1: [e1], U_ARROW: [e0]})
        assert U.equiv(along_u, with_id) is expected


def test_carrier_indices_do_not_depend_on_the_topology():
    a, b = build_universe(dense_topology(C2), 3), build_universe(trivial_topology(C2), 3)
    assert a.names == b.names


def test_errors():
    U = build_universe(trivial_topology(C2), 2)
    with pytest.raises(UnknownLiteral):
        U.mem(0, 999)
    with pytest.raises(RootMismatch):
        U.equiv(empty_name(U, 0), empty_name(U, 1))
    with pytest.raises(UnknownLiteral):
        U.name_of(0, {C2.identity[0]: [empty_name(U, 1)]})
    with pytest.raises(CarrierTooLarge):
        build_universe(POINT, 5, limit=100)


@given(st.sampled_from(SITES))
def test_equivalence_is_a_congruence(top):
    U = build_universe(top, 2)
    cat = top.cat
    for c, idx in enumerate(U.by_object):
        for i in idx:
            assert U.equiv(i, i)
        for i, j in itertools.product(idx, repeat=2):
            if U.equiv(i, j):
                assert U.equiv(j, i)
                assert all(U.equiv(U.restrict(i, f), U.restrict(j, f)) for f in cat.into(c))
                assert all(U.equiv(i, k) for k in idx if U.equiv(j, k))
                # membership respects the quotient on both sides
                assert all(U.mem(k, i) == U.mem(k, j) and U.mem(i, k) == U.mem(j, k) for k in idx)


@given(st.sampled_from(SITES))
def test_membership_is_monotone_under_restriction(top):
    U = build_universe(top, 2)
    for c, idx in enumerate(U.by_object):
        for i, j in itertools.product(idx, repeat=2):
            if U.mem(i, j):
                assert all(U.mem(U.restrict(i, f), U.restrict(j, f)) for f in top.cat.into(c))
