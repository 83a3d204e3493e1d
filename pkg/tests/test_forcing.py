from __future__ import annotations

import itertools
import random
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from finsheaf.category import chain
from finsheaf.coverage import dense_topology, trivial_topology
from finsheaf.errors import OpenFormula, RootMismatch, UnknownLiteral
from finsheaf.forcing import Forcing, check_rst_axioms, force
from finsheaf.formulas import FALSE, TRUE, All, Eq, Lit, Mem, Not, Or, Var, iff, parse_formula
from finsheaf.io import load_site
from finsheaf.names import build_universe

from helpers import random_formula

SITES_DIR = Path(__file__).resolve().parent.parent / "sites"
C2 = chain(2)
U_ARROW = C2.arrow("0<=1")

# (site file, rank)
FORCING_SITES = [
    ("trivial_point", 3),
    ("degenerate_point", 2),
    ("two_chain_trivial", 2),
    ("two_chain_dense", 2),
    ("v_dense", 2),
    ("z2_trivial", 2),
    ("diamond_dense", 2),
]


@lru_cache(maxsize=None)
def universe(name: str, rank: int):
    return build_universe(load_site(SITES_DIR / f"{name}.json"), rank)


def lem_instance(top):
    """e ε a ∨ ¬(e ε a) at 1, where a has ∅ as a member only along 0 → 1."""
    U = build_universe(top, 2)
    e0, e1 = U.name_of(0, {}), U.name_of(1, {})
    a = U.name_of(1, {U_ARROW: [e0]})
    phi = Or(Mem(Lit(e1), Lit(a)), Not(Mem(Lit(e1), Lit(a))))
    return U, phi


def test_constants():
    U = universe("two_chain_trivial", 2)
    assert force(U, 1, TRUE) and not force(U, 1, FALSE)
    D = universe("degenerate_point", 2)
    assert force(D, 0, FALSE)


def test_excluded_middle_fails_without_the_dense_cover():
    U, phi = lem_instance(trivial_topology(C2))
    assert not force(U, 1, phi)
    U, phi = lem_instance(dense_topology(C2))
    assert force(U, 1, phi)
    # the membership itself holds at 1 only in the dense case
    assert force(U, 1, phi.left)


def test_extensionality_antecedent_matches_set_equality_on_the_point():
    U = universe("trivial_point", 3)
    x = Var("x")
    for i, j in itertools.product(U.by_object[0], repeat=2):
        A, B = Lit(i), Lit(j)
        same = All("x", iff(Mem(x, A), Mem(x, B)))
        assert force(U, 0, same) == U.equiv(i, j)
        assert force(U, 0, Eq(A, B)) == U.equiv(i, j)


def test_errors():
    U = universe("two_chain_trivial", 2)
    with pytest.raises(OpenFormula):
        force(U, 1, Mem(Var("x"), Lit(0)))
    with pytest.raises(RootMismatch):
        force(U, 1, Mem(Lit(0), Lit(0)))
    with pytest.raises(UnknownLiteral):
        force(U, 0, parse_formula("(mem #0 #99)"))


def test_rst_axioms_on_small_sites():
    for name, rank in (("trivial_point", 3), ("two_chain_dense", 2), ("two_chain_trivial", 2), ("v_dense", 2)):
        report = check_rst_axioms(universe(name, rank))
        assert report["ok"], (name, report)
        assert report["axioms"]["infinity"]["status"] == "not checkable"
        assert {k for k in report["axioms"]} == {
            "bounded_separation", "empty_set", "extensionality", "infinity",
            "pairing", "set_induction", "strong_collection", "union",
        }


def _pool(U, c, seed, n):
    rng = random.Random(seed)
    lits = U.quantifier_range(c)[:4]
    return [random_formula(rng, lits, rng.randint(0, 3)) for _ in range(n)]


@given(st.sampled_from(FORCING_SITES), st.integers(0, 10_000))
def test_forcing_is_monotone(site, seed):
    U = universe(*site)
    F, cat = Forcing(U), U.cat
    for c in range(cat.n_objects):
        for phi in _pool(U, c, seed, 4):
            if F.force(c, phi):
                for f in cat.into(c):
                    assert F.force(cat.dom[f], F.restrict(phi, f))


@given(st.sampled_from(FORCING_SITES), st.integers(0, 10_000))
def test_forcing_has_local_character(site, seed):
    U = universe(*site)
    F, cat, top = Forcing(U), U.cat, U.top
    for c in range(cat.n_objects):
        for phi in _pool(U, c, seed, 4):
            forced_below = {f for f in cat.into(c) if F.force(cat.dom[f], F.restrict(phi, f))}
            if any(S.arrows <= forced_below for S in top.covering(c)):
                assert F.force(c, phi)
