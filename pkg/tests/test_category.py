from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from finsheaf.category import (
    chain,
    discrete_category,
    monoid_category,
    order_closure,
    poset_as_category,
    validate_category,
)
from finsheaf.errors import CategoryError, NotAPartialOrder, UnknownArrow, UnknownObject

from helpers import labelled_posets, small_categories

TWO_CHAIN = {
    "objects": ["0", "1"],
    "arrows": [
        {"id": "id0", "dom": "0", "cod": "0"},
        {"id": "id1", "dom": "1", "cod": "1"},
        {"id": "u", "dom": "0", "cod": "1"},
    ],
    "identity": {"0": "id0", "1": "id1"},
    "compose": [["id0", "id0", "id0"], ["id1", "id1", "id1"], ["u", "id0", "u"], ["id1", "u", "u"]],
}


def test_two_chain_is_valid():
    cat = validate_category(TWO_CHAIN)
    assert cat.n_objects == 2 and cat.n_arrows == 3
    u = cat.arrow("u")
    assert cat.compose(cat.arrow("id1"), u) == u


def test_omitted_composite_is_reported_with_its_arrows():
    raw = dict(TWO_CHAIN, compose=[c for c in TWO_CHAIN["compose"] if c != ["id1", "u", "u"]])
    with pytest.raises(CategoryError) as info:
        validate_category(raw)
    (v,) = info.value.violations
    assert v.kind == "MissingComposite"
    assert v.detail == {"first": "u", "then": "id1"}


def test_dangling_endpoint_and_missing_identity():
    raw = dict(TWO_CHAIN, arrows=TWO_CHAIN["arrows"] + [{"id": "v", "dom": "0", "cod": "2"}])
    with pytest.raises(CategoryError) as info:
        validate_category(raw)
    assert info.value.kinds == ["DanglingEndpoint"]
    raw = dict(TWO_CHAIN, identity={"0": "id0"})
    with pytest.raises(CategoryError) as info:
        validate_category(raw)
    assert "MissingIdentity" in info.value.kinds


def test_non_associative_table_is_rejected():
    # one object, arrows e, a, b with a∘a = b, b∘a = a, a∘b = e, b∘b = e: (a∘a)∘b ≠ a∘(a∘b)
    mult = {("e", x): x for x in "eab"} | {(x, "e"): x for x in "eab"}
    mult |= {("a", "a"): "b", ("b", "a"): "a", ("a", "b"): "e", ("b", "b"): "e"}
    with pytest.raises(CategoryError) as info:
        monoid_category(["e", "a", "b"], mult, "e")
    assert "NonAssociative" in info.value.kinds


def test_two_element_group_is_valid():
    mult = {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"}
    cat = monoid_category(["e", "s"], mult, "e")
    s = cat.arrow("s")
    assert cat.compose(s, s) == cat.identity[0]
    # all 8 associativity triples
    for h, g, f in itertools.product(range(2), repeat=3):
        assert cat.compose(h, cat.compose(g, f)) == cat.compose(cat.compose(h, g), f)


def test_poset_shapes():
    anti = poset_as_category(["a", "b"], [("a", "a"), ("b", "b")])
    assert all(anti.is_identity(f) for f in range(anti.n_arrows))
    assert chain(2).n_arrows == 3
    diamond = ["bot", "x", "y", "top"]
    leq = order_closure(diamond, [("bot", "x"), ("bot", "y"), ("x", "top"), ("y", "top")])
    assert poset_as_category(diamond, leq).n_arrows == 9
    assert discrete_category(1).objects == ("*",)


def test_not_a_partial_order():
    with pytest.raises(NotAPartialOrder) as info:
        poset_as_category(["a", "b"], [("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")])
    assert "NotAntisymmetric" in info.value.kinds
    with pytest.raises(NotAPartialOrder):
        poset_as_category(["a", "b", "c"], [("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")])


def test_unknown_names():
    cat = chain(2)
    with pytest.raises(UnknownObject):
        cat.obj("7")
    with pytest.raises(UnknownArrow):
        cat.arrow("nope")


def test_enumerators_match_known_counts():
    # labelled partial orders on n points, monoids of order n up to isomorphism
    assert [len(labelled_posets(n)) for n in range(1, 5)] == [1, 3, 19, 219]
    by_shape = {}
    for c in small_categories():
        by_shape[(c.n_objects, c.n_arrows)] = by_shape.get((c.n_objects, c.n_arrows), 0) + 1
    assert [by_shape.get((1, k), 0) for k in range(1, 5)] == [1, 2, 7, 35]


@given(st.sampled_from(small_categories()))
def test_category_laws(cat):
    for f in range(cat.n_arrows):
        assert cat.compose(cat.identity[cat.cod[f]], f) == f
        assert cat.compose(f, cat.identity[cat.dom[f]]) == f
    for f in range(cat.n_arrows):
        for g in cat.out_of(cat.cod[f]):
            gf = cat.compose(g, f)
            assert cat.dom[gf] == cat.dom[f] and cat.cod[gf] == cat.cod[g]
            for h in cat.out_of(cat.cod[g]):
                assert cat.compose(h, gf) == cat.compose(cat.compose(h, g), f)


@given(st.sampled_from(labelled_posets(3) + labelled_posets(4)))
def test_posets_round_trip_through_description(cat):
    again = validate_category(cat.describe())
    assert again == cat
    assert again.arrows == cat.arrows and again.objects == cat.objects
