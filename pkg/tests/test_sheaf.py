from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from finsheaf.category import chain, discrete_category, poset_as_category
from finsheaf.coverage import dense_topology, generate_topology, max_sieve, trivial_topology, Sieve
from finsheaf.errors import NotASheaf
from finsheaf.presheaf import (
    constant,
    empty,
    homs,
    morphism_from_function,
    power_object,
    presheaf_from_action,
    product,
    representable,
    terminal,
)
from finsheaf.sheaf import (
    compatible_families,
    factorizations,
    is_locally_surjective,
    is_separated,
    is_sheaf,
    plus,
    sheaf_power_object,
    sheafify,
)

from helpers import all_presheaves, all_topologies, isomorphisms, small_categories

C2 = chain(2)
U = C2.arrow("0<=1")
DENSE = dense_topology(C2)
TRIVIAL = trivial_topology(C2)
EMPTY_BOTTOM = generate_topology(C2, [[Sieve(0, frozenset())], [Sieve(1, frozenset({U, C2.identity[1]}))]])
V = poset_as_category(["a", "b", "t"], [("a", "a"), ("b", "b"), ("t", "t"), ("a", "t"), ("b", "t")])
V_DENSE = dense_topology(V)

CATS = [c for c in small_categories() if c.n_arrows <= 3]
SITES = [(c, t) for c in CATS for t in all_topologies(c)]
PAIRS = [(t, P) for c, t in SITES for P in all_presheaves(c)]


def collapsing():
    """P(1) = {p, q}, P(0) = {*}, both restricting to *."""
    return presheaf_from_action(C2, [("*",), ("p", "q")], lambda x, f: "*" if f == U else x)


def test_compatible_families_on_the_collapsing_presheaf():
    fams = compatible_families(collapsing(), DENSE, 1)
    shapes = sorted((sorted(C2.arrows[f] for f in fam.sieve), [x for _, x in fam.choice]) for fam in fams)
    assert shapes == [(["0<=1"], ["*"]), (["0<=1", "id_1"], ["*", "p"]), (["0<=1", "id_1"], ["*", "q"])]


def test_empty_family_over_an_empty_cover():
    fams = compatible_families(empty(C2), EMPTY_BOTTOM, 0)
    assert len(fams) == 1 and fams[0].choice == ()


def test_collapsing_presheaf_is_not_separated_and_collapses():
    P = collapsing()
    res = is_separated(P, DENSE)
    assert not res
    assert res.witness == {"object": "1", "cover": ["0<=1"], "elements": ["p", "q"]}
    assert plus(P, DENSE).presheaf.sizes() == (1, 1)
    assert sheafify(P, DENSE).sheaf.sizes() == (1, 1)


def test_representable_top_is_a_sheaf_for_the_dense_topology():
    y1 = representable(C2, 1)
    assert is_sheaf(y1, DENSE)
    sh = sheafify(y1, DENSE)
    assert sh.unit.is_iso()


def test_sheafifying_the_empty_presheaf():
    assert sheafify(empty(C2), DENSE).sheaf.sizes() == (0, 0)
    # the empty family glues at 0; 1 is covered only by its maximal sieve
    assert plus(empty(C2), EMPTY_BOTTOM).presheaf.sizes() == (1, 0)
    assert sheafify(empty(C2), EMPTY_BOTTOM).sheaf.sizes() == (1, 0)


def test_every_presheaf_is_a_sheaf_for_the_trivial_topology():
    for P in all_presheaves(C2):
        assert is_sheaf(P, TRIVIAL)
        assert sheafify(P, TRIVIAL).unit.is_iso()


def test_non_glueing_family_is_reported():
    # separated but missing the glueing of the family at b and a on the V
    P = presheaf_from_action(V, [("x",), ("y",), ()], lambda e, f: e)
    res = is_sheaf(P, V_DENSE)
    assert not res and res.witness["object"] == "t"


def test_local_surjectivity():
    X = representable(C2, 1)
    below = presheaf_from_action(C2, [("0<=1",), ()], lambda e, f: e)
    F = morphism_from_function(below, X, lambda a, e: e)
    assert not F.is_componentwise_surjective()
    assert is_locally_surjective(F, DENSE)
    assert not is_locally_surjective(F, TRIVIAL)
    assert is_locally_surjective(morphism_from_function(empty(C2), empty(C2), lambda a, e: e), TRIVIAL)
    # nonempty only at the object covered by ∅
    X0 = presheaf_from_action(C2, [("p",), ()], lambda e, f: e)
    assert is_locally_surjective(morphism_from_function(empty(C2), X0, lambda a, e: e), EMPTY_BOTTOM)


def test_sheaf_power_object():
    X = constant(discrete_category(1), ["a", "b"])
    top = trivial_topology(X.cat)
    assert sheaf_power_object(X, top).presheaf.sizes() == (4,)
    one = terminal(C2)
    assert sheaf_power_object(one, TRIVIAL).presheaf.sizes() == power_object(one).presheaf.sizes() == (2, 3)
    # the sieves {u} and M_1 on 1 differ only above a dense sieve
    assert sheaf_power_object(one, DENSE).presheaf.sizes() == (2, 2)
    with pytest.raises(NotASheaf):
        sheaf_power_object(collapsing(), DENSE)


def test_sheaf_power_object_on_v_is_a_sheaf_and_membership_is_local():
    X = terminal(V)
    res = sheaf_power_object(X, V_DENSE)
    assert is_sheaf(res.presheaf, V_DENSE)
    assert not res.membership.of.violations()


@given(st.sampled_from(PAIRS))
def test_plus_separates_and_plus_plus_is_a_sheaf(pair):
    top, P = pair
    first = plus(P, top)
    assert is_separated(first.presheaf, top)
    if is_separated(P, top):
        assert is_sheaf(first.presheaf, top)
    assert is_sheaf(sheafify(P, top).sheaf, top)


@given(st.sampled_from(PAIRS))
def test_plus_with_basic_covers_agrees(pair):
    top, P = pair
    a, b = plus(P, top), plus(P, top, use_basis=True)
    assert a.presheaf.sizes() == b.presheaf.sizes()
    assert a.quotient == b.quotient


@given(st.sampled_from(PAIRS), st.data())
def test_unique_factorization_through_the_unit(pair, data):
    top, P = pair
    sheaves = [G for G in all_presheaves(top.cat) if is_sheaf(G, top)]
    G = data.draw(st.sampled_from(sheaves))
    sh = sheafify(P, top)
    for h in homs(P, G):
        assert len(factorizations(sh, h)) == 1


@given(st.sampled_from(PAIRS), st.data())
def test_sheafification_preserves_binary_products(pair, data):
    top, P = pair
    Q = data.draw(st.sampled_from(all_presheaves(top.cat, 1)))
    lhs = sheafify(product(P, Q), top).sheaf
    rhs = product(sheafify(P, top).sheaf, sheafify(Q, top).sheaf)
    assert next(isomorphisms(lhs, rhs), None) is not None


@given(st.sampled_from(SITES), st.data())
def test_local_surjections_compose(site, data):
    cat, top = site
    Ps = all_presheaves(cat)
    X, Y, Z = (data.draw(st.sampled_from(Ps)) for _ in range(3))
    fs, gs = list(homs(X, Y)), list(homs(Y, Z))
    if not fs or not gs:
        return
    f, g = data.draw(st.sampled_from(fs)), data.draw(st.sampled_from(gs))
    if f.is_componentwise_surjective():
        assert is_locally_surjective(f, top)
    if is_locally_surjective(f, top) and is_locally_surjective(g, top):
        assert is_locally_surjective(f.then(g), top)
