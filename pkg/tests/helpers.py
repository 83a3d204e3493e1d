"""Brute-force enumerators and oracles shared by the test modules."""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator

from finsheaf.category import FiniteCategory, poset_as_category, validate_category
from finsheaf.coverage import Sieve, all_sieves, topology_violations, Topology
from finsheaf.presheaf import Presheaf, PresheafMorphism, homs

# ---------------------------------------------------------------------------
# posets


@lru_cache(maxsize=None)
def labelled_posets(n: int) -> tuple[FiniteCategory, ...]:
    """Every partial order on {0, …, n-1}, as categories."""
    elems = [str(i) for i in range(n)]
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for mask in range(1 << len(off)):
        rel = {(i, i) for i in range(n)} | {off[k] for k in range(len(off)) if mask >> k & 1}
        if any((j, i) in rel for i, j in rel if i != j):
            continue
        if any((i, k) not in rel for i, j in rel for j2, k in rel if j == j2):
            continue
        out.append(poset_as_category(elems, [(elems[i], elems[j]) for i, j in rel]))
    return tuple(out)


# ---------------------------------------------------------------------------
# small categories up to isomorphism


def _encode(n_obj: int, dom, cod, ident, table, obj_perm, arr_perm) -> tuple:
    inv = {new: old for old, new in enumerate(arr_perm)}
    m = len(dom)
    return tuple(
        (obj_perm[dom[inv[f]]], obj_perm[cod[inv[f]]],
         tuple(arr_perm[table[inv[g]][inv[f]]] if table[inv[g]][inv[f]] is not None else -1 for g in range(m)))
        for f in range(m)
    ) + tuple(arr_perm[ident[o]] for o in sorted(range(n_obj), key=lambda o: obj_perm[o]))


def _canonical(n_obj, dom, cod, ident, table) -> tuple:
    m = len(dom)
    best = None
    for op in itertools.permutations(range(n_obj)):
        for ap in itertools.permutations(range(m)):
            if any(ap[ident[o]] != op[o] for o in range(n_obj)):
                continue
            code = _encode(n_obj, dom, cod, ident, table, op, ap)
            if best is None or code < best:
                best = code
    return best


@lru_cache(maxsize=None)
def small_categories(max_objects: int = 2, max_arrows: int = 4) -> tuple[FiniteCategory, ...]:
    """Every category with ≤ max_objects objects and ≤ max_arrows arrows, up to isomorphism."""
    found: dict[tuple, FiniteCategory] = {}
    for n in range(1, max_objects + 1):
        ends = [(d, c) for d in range(n) for c in range(n)]
        for k in range(0, max_arrows - n + 1):
            for extra in itertools.combinations_with_replacement(ends, k):
                dom = list(range(n)) + [d for d, _ in extra]
                cod = list(range(n)) + [c for _, c in extra]
                ident = list(range(n))
                m = len(dom)
                for table in _tables(n, dom, cod):
                    key = _canonical(n, dom, cod, ident, table)
                    if key in found:
                        continue
                    names = [f"id_{o}" for o in range(n)] + [f"f{i}" for i in range(k)]
                    found[key] = validate_category(
                        {
                            "objects": [str(o) for o in range(n)],
                            "arrows": [{"id": names[f], "dom": str(dom[f]), "cod": str(cod[f])} for f in range(m)],
                            "identity": {str(o): names[o] for o in range(n)},
                            "compose": [
                                [names[g], names[f], names[table[g][f]]]
                                for g in range(m)
                                for f in range(m)
                                if table[g][f] is not None
                            ],
                        }
                    )
    return tuple(found[k] for k in sorted(found))


def _tables(n: int, dom: list[int], cod: list[int]) -> Iterator[list[list[int | None]]]:
    m = len(dom)
    table: list[list[int | None]] = [[None] * m for _ in range(m)]
    todo = []
    for g in range(m):
        for f in range(m):
            if cod[f] != dom[g]:
                continue
            if g < n:
                table[g][f] = f
            elif f < n:
                table[g][f] = g
            else:
                todo.append((g, f))

    def consistent() -> bool:
        for h in range(m):
            for g in range(m):
                hg = table[h][g]
                if hg is None:
                    continue
                for f in range(m):
                    gf = table[g][f]
                    if gf is None:
                        continue
                    left, right = table[h][gf], table[hg][f]
                    if left is not None and right is not None and left != right:
                        return False
        return True

    def rec(i: int) -> Iterator[list[list[int | None]]]:
        if i == len(todo):
            yield [row[:] for row in table]
            return
        g, f = todo[i]
        for h in range(m):
            if dom[h] == dom[f] and cod[h] == cod[g]:
                table[g][f] = h
                if consistent():
                    yield from rec(i + 1)
        table[g][f] = None

    yield from rec(0)


# ---------------------------------------------------------------------------
# topologies


def all_topologies(cat: FiniteCategory) -> list[Topology]:
    """Every Grothendieck topology on a small category."""
    per = [all_sieves(cat, a) for a in range(cat.n_objects)]
    choices = []
    for a in range(cat.n_objects):
        full = max(per[a], key=len)
        rest = [s for s in per[a] if s != full]
        choices.append([frozenset({full, *c}) for r in range(len(rest) + 1) for c in itertools.combinations(rest, r)])
    out = []
    for cov in itertools.product(*choices):
        if not topology_violations(cat, cov):
            out.append(Topology(cat, tuple(cov), None, "explicit"))
    return out


# ---------------------------------------------------------------------------
# presheaves


def all_presheaves(cat: FiniteCategory, max_fiber: int = 2, up_to_iso: bool = True) -> list[Presheaf]:
    out: list[Presheaf] = []
    for sizes in itertools.product(range(max_fiber + 1), repeat=cat.n_objects):
        fibers = [tuple(f"{cat.objects[a]}{i}" for i in range(n)) for a, n in enumerate(sizes)]
        slots = [(f, x) for f in range(cat.n_arrows) if not cat.is_identity(f) for x in fibers[cat.cod[f]]]
        options = [fibers[cat.dom[f]] for f, _ in slots]
        found: list[Presheaf] = []
        for vals in itertools.product(*options):
            P = Presheaf(cat, fibers, dict(zip(slots, vals)), validate=False)
            if P.violations():
                continue
            if up_to_iso and any(next(isomorphisms(P, Q), None) is not None for Q in found):
                continue
            found.append(P)
        out += found
    return out


def isomorphisms(X: Presheaf, Y: Presheaf) -> Iterator[PresheafMorphism]:
    if X.sizes() != Y.sizes():
        return
    for m in homs(X, Y):
        if m.is_iso():
            yield m


def all_morphisms(Ps: list[Presheaf]) -> Iterator[PresheafMorphism]:
    for X in Ps:
        for Y in Ps:
            yield from homs(X, Y)


def sieve(cat: FiniteCategory, a: str, *arrows: str) -> Sieve:
    return Sieve(cat.obj(a), frozenset(cat.arrow(f) for f in arrows))


# ---------------------------------------------------------------------------
# formulas


def random_formula(rng, lits: list[int], depth: int, bound: tuple[str, ...] = (), max_height: int | None = None):
    """A random formula whose free variables are among ``bound``, literals drawn from ``lits``."""
    from finsheaf.formulas import (
        FALSE, TRUE, All, AllIn, And, Ex, ExIn, Eq, Implies, Lit, Mem, Not, Or, Var,
    )

    terms = [Lit(i) for i in lits] + [Var(v) for v in bound]

    def atom():
        roll = rng.random()
        if roll < 0.05 or not terms:
            return rng.choice([TRUE, FALSE])
        cls = Mem if roll < 0.7 else Eq
        return cls(rng.choice(terms), rng.choice(terms))

    if depth <= 0:
        return atom()
    kind = rng.choice(["atom", "and", "or", "implies", "not", "all", "ex", "all-in", "ex-in"])
    if kind == "atom":
        return atom()
    if kind in ("and", "or", "implies"):
        cls = {"and": And, "or": Or, "implies": Implies}[kind]
        return cls(
            random_formula(rng, lits, depth - 1, bound, max_height),
            random_formula(rng, lits, depth - 1, bound, max_height),
        )
    if kind == "not":
        return Not(random_formula(rng, lits, depth - 1, bound, max_height))
    var = f"v{len(bound)}"
    body = random_formula(rng, lits, depth - 1, bound + (var,), max_height)
    if kind == "all":
        return All(var, body, max_height)
    if kind == "ex":
        return Ex(var, body, max_height)
    if not terms:
        return atom()
    cls = AllIn if kind == "all-in" else ExIn
    return cls(var, rng.choice(terms), body)
