from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from finsheaf.category import chain, discrete_category
from finsheaf.coverage import dense_topology, trivial_topology
from finsheaf.errors import NotSmall
from finsheaf.mvs import (
    check_generic,
    default_test_objects,
    enumerate_mvs,
    minimal_mvs,
    mvs_violations,
    pullback_mvs,
    representable_family,
    search_minimal_mvs,
)
from finsheaf.presheaf import (
    SmallnessClass,
    constant,
    homs,
    identity_morphism,
    morphism_from_function,
    presheaf_from_action,
    terminal,
)

from helpers import all_morphisms, all_presheaves, all_topologies, small_categories

POINT = discrete_category(1)
C2 = chain(2)
U = C2.arrow("0<=1")
CATS = [c for c in small_categories() if c.n_arrows <= 3]
MORPHISMS = [F for c in CATS for F in all_morphisms(all_presheaves(c))]
SITE_MORPHISMS = [(t, F) for c in CATS for t in all_topologies(c) for F in all_morphisms(all_presheaves(c))]


def two_to_one():
    B = constant(POINT, ["y1", "y2"])
    return morphism_from_function(B, constant(POINT, ["a"]), lambda a, y: "a")


def fiber_sets(mvss):
    return [sorted(b for _, _, b in m.members()) for m in mvss]


def test_two_point_fiber_has_three_mvss():
    assert fiber_sets(enumerate_mvs(two_to_one())) == [["y1"], ["y2"], ["y1", "y2"]]


def test_isomorphism_has_one_mvs_and_every_family_is_generic():
    phi = identity_morphism(presheaf_from_action(C2, [("p", "q"), ("x",)], lambda e, f: "p" if f == U else e))
    (only,) = enumerate_mvs(phi)
    assert only.carrier.size() == 3
    assert check_generic([only], phi)


def test_restriction_prunes_the_per_object_choices():
    B = presheaf_from_action(C2, [("c1", "c2"), ("b1", "b2")], lambda e, f: {"b1": "c1", "b2": "c2"}[e] if f == U else e)
    phi = morphism_from_function(B, terminal(C2), lambda a, e: "*")
    per_object = [[set(s) for r in range(1, 3) for s in itertools.combinations(fb, r)] for fb in B.fibers]
    closed = [
        (low, high)
        for low, high in itertools.product(*per_object)
        if all(B.restrict(b, U) in low for b in high)
    ]
    assert len(closed) == 5 < 9
    assert len(enumerate_mvs(phi)) == len(closed)


def test_generic_and_non_generic_families():
    phi = two_to_one()
    every = enumerate_mvs(phi)
    singles = [m for m in every if m.carrier.size() == 1]
    both = [m for m in every if m.carrier.size() == 2]
    assert check_generic(every, phi)
    assert check_generic(singles, phi)
    res = check_generic(both, phi)
    assert not res
    assert res.witness["test_object"] == "1"
    assert res.witness["mvs"]["members"] == [["*", "*", "y1"]]


def test_local_mode_admits_sections_that_only_cover_locally():
    phi = identity_morphism(terminal(C2))
    assert len(enumerate_mvs(phi, "pointwise")) == 1
    local = enumerate_mvs(phi, "local", dense_topology(C2))
    assert [m.carrier.size() for m in local] == [1, 2]


def test_smallness_is_enforced():
    with pytest.raises(NotSmall):
        enumerate_mvs(two_to_one(), smallness=SmallnessClass(1))
    big = enumerate_mvs(two_to_one())[-1]
    kinds = [v.kind for v in mvs_violations(big.phi, big.base, big.carrier, smallness=SmallnessClass(1))]
    assert kinds == ["NotSmall"]


def test_default_test_objects():
    assert [label for label, _ in default_test_objects(C2)] == ["1", "y(0)", "y(1)", "y(0)xy(0)", "y(0)xy(1)", "y(1)xy(1)"]


@given(st.sampled_from(MORPHISMS))
def test_enumerated_mvss_are_valid_and_search_finds_the_minimal_ones(phi):
    for label, Z in default_test_objects(phi.src.cat)[:3]:
        every = enumerate_mvs(phi, base=Z, label=label)
        for m in every:
            assert not mvs_violations(m.phi, m.base, m.carrier)
        want = sorted(sorted(m.members()) for m in minimal_mvs(every))
        got = sorted(sorted(m.members()) for m in search_minimal_mvs(phi, base=Z, label=label))
        assert got == want


@given(st.sampled_from(SITE_MORPHISMS), st.sampled_from(["pointwise", "local"]))
def test_pullback_along_test_maps_preserves_mvss(pair, mode):
    top, phi = pair
    tests = default_test_objects(top.cat)
    for (_, Z), (_, W) in itertools.product(tests[:3], repeat=2):
        for Q in enumerate_mvs(phi, mode, top, Z):
            for k in homs(W, Z):
                P = pullback_mvs(Q, k)
                assert not mvs_violations(phi, W, P.carrier, mode, top)


@given(st.sampled_from(SITE_MORPHISMS), st.sampled_from(["pointwise", "local"]))
def test_minimal_mvss_over_representables_are_generic(pair, mode):
    top, phi = pair
    fam = representable_family(phi, "minimal", mode, top)
    res = check_generic(fam, phi, mode=mode, top=top)
    assert res, res.witness
