"""Sieves, Grothendieck topologies and presentations on a finite category."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from .category import FiniteCategory
from .errors import (
    CodomainMismatch,
    GeneratedFamilyNotATopology,
    NotAPoset,
    TopologyError,
    UnknownObject,
    Violation,
)


@dataclass(frozen=True, order=True)
class Sieve:
    at: int
    arrows: frozenset[int]

    def __contains__(self, f: int) -> bool:
        return f in self.arrows

    def __len__(self) -> int:
        return len(self.arrows)

    def sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.arrows))

    def names(self, cat: FiniteCategory) -> list[str]:
        return [cat.arrows[f] for f in self.sorted()]


def _sort_key(s: Sieve) -> tuple:
    return (len(s.arrows), tuple(sorted(s.arrows)))


def is_sieve(cat: FiniteCategory, a: int, arrows: Iterable[int]) -> bool:
    arrows = set(arrows)
    for f in arrows:
        if cat.cod[f] != a:
            return False
        for g in cat.into(cat.dom[f]):
            if cat.compose(f, g) not in arrows:
                return False
    return True


def max_sieve(cat: FiniteCategory, a: int) -> Sieve:
    if not 0 <= a < cat.n_objects:
        raise UnknownObject(a)
    return Sieve(a, frozenset(cat.into(a)))


def empty_sieve(a: int) -> Sieve:
    return Sieve(a, frozenset())


def generated_sieve(cat: FiniteCategory, a: int, arrows: Iterable[int]) -> Sieve:
    """Smallest sieve at ``a`` containing the given arrows."""
    out: set[int] = set()
    for f in arrows:
        if cat.cod[f] != a:
            raise CodomainMismatch(f"{cat.arrows[f]} does not land in {cat.objects[a]}")
        out.update(cat.compose(f, g) for g in cat.into(cat.dom[f]))
    return Sieve(a, frozenset(out))


def largest_subsieve(cat: FiniteCategory, a: int, arrows: Iterable[int]) -> Sieve:
    """Largest sieve at ``a`` contained in an arbitrary set of arrows; arrows not into ``a`` are ignored."""
    arrows = {f for f in arrows if cat.cod[f] == a}
    return Sieve(
        a,
        frozenset(f for f in arrows if all(cat.compose(f, g) in arrows for g in cat.into(cat.dom[f]))),
    )


def pullback_sieve(cat: FiniteCategory, sieve: Sieve, f: int) -> Sieve:
    """f*S = {g : f∘g ∈ S}, a sieve on dom(f)."""
    if cat.cod[f] != sieve.at:
        raise CodomainMismatch(f"{cat.arrows[f]} does not land in {cat.objects[sieve.at]}")
    b = cat.dom[f]
    return Sieve(b, frozenset(g for g in cat.into(b) if cat.table[f][g] in sieve.arrows))


def all_sieves(cat: FiniteCategory, a: int) -> tuple[Sieve, ...]:
    """Every sieve on ``a``, ordered by size then arrow indices."""
    cache = cat._cache.setdefault("sieves", {})
    if a not in cache:
        into = cat.into(a)
        found = []
        for r in range(len(into) + 1):
            for combo in combinations(into, r):
                if is_sieve(cat, a, combo):
                    found.append(Sieve(a, frozenset(combo)))
        cache[a] = tuple(sorted(found, key=_sort_key))
    return cache[a]


@dataclass(frozen=True)
class Presentation:
    """Basic covering sieves per object."""

    bcov: tuple[tuple[Sieve, ...], ...]


@dataclass(frozen=True)
class Topology:
    cat: FiniteCategory
    cov: tuple[frozenset[Sieve], ...]
    presentation: Presentation | None = field(default=None, compare=False)
    kind: str = field(default="explicit", compare=False)

    def covers(self, sieve: Sieve) -> bool:
        return sieve in self.cov[sieve.at]

    def covers_arrows(self, a: int, arrows: Iterable[int]) -> bool:
        return Sieve(a, frozenset(arrows)) in self.cov[a]

    def covering(self, a: int) -> tuple[Sieve, ...]:
        """Covering sieves at ``a`` in canonical order."""
        return tuple(sorted(self.cov[a], key=_sort_key))

    def degenerate(self, a: int) -> bool:
        """Whether the empty sieve covers ``a``."""
        return Sieve(a, frozenset()) in self.cov[a]

    def describe(self) -> dict:
        cat = self.cat
        return {
            "kind": "explicit",
            "cov": {
                cat.objects[a]: [s.names(cat) for s in self.covering(a)] for a in range(cat.n_objects)
            },
        }


def topology_violations(cat: FiniteCategory, cov: Sequence[Iterable[Sieve]]) -> list[Violation]:
    """Every axiom failure of a candidate family of sieves, with witnesses."""
    out: list[Violation] = []
    fam = [frozenset(c) for c in cov]
    if len(fam) != cat.n_objects:
        return [Violation("WrongShape", {"expected_objects": cat.n_objects, "got": len(fam)})]
    for a in range(cat.n_objects):
        for s in sorted(fam[a], key=_sort_key):
            if s.at != a or not is_sieve(cat, a, s.arrows):
                out.append(Violation("NotASieve", {"object": cat.objects[a], "sieve": s.names(cat)}))
    if out:
        return out
    for a in range(cat.n_objects):
        if max_sieve(cat, a) not in fam[a]:
            out.append(Violation("MaximalityViolation", {"object": cat.objects[a]}))
    for a in range(cat.n_objects):
        for s in sorted(fam[a], key=_sort_key):
            for f in cat.into(a):
                pb = pullback_sieve(cat, s, f)
                if pb not in fam[cat.dom[f]]:
                    out.append(
                        Violation(
                            "StabilityViolation",
                            {"object": cat.objects[a], "sieve": s.names(cat), "arrow": cat.arrows[f]},
                        )
                    )
    for a in range(cat.n_objects):
        for s in all_sieves(cat, a):
            if s in fam[a]:
                continue
            for r in sorted(fam[a], key=_sort_key):
                if all(pullback_sieve(cat, s, f) in fam[cat.dom[f]] for f in r.arrows):
                    out.append(
                        Violation(
                            "LocalCharacterViolation",
                            {"object": cat.objects[a], "sieve": s.names(cat), "cover": r.names(cat)},
                        )
                    )
                    break
    return out


def validate_topology(cat: FiniteCategory, cov: Sequence[Iterable[Sieve]], kind: str = "explicit",
                      presentation: Presentation | None = None) -> Topology:
    """Validate maximality, stability and local character exhaustively."""
    violations = topology_violations(cat, cov)
    if violations:
        raise TopologyError(violations)
    return Topology(cat, tuple(frozenset(c) for c in cov), presentation, kind)


def trivial_topology(cat: FiniteCategory) -> Topology:
    cov = [{max_sieve(cat, a)} for a in range(cat.n_objects)]
    pres = Presentation(tuple((max_sieve(cat, a),) for a in range(cat.n_objects)))
    return validate_topology(cat, cov, "trivial", pres)


def is_dense_below(cat: FiniteCategory, sieve: Sieve) -> bool:
    p = sieve.at
    doms = {cat.dom[f] for f in sieve.arrows}
    for q in range(cat.n_objects):
        if cat.leq(q, p) and not any(cat.leq(r, q) and r in doms for r in range(cat.n_objects)):
            return False
    return True


def dense_topology(cat: FiniteCategory) -> Topology:
    """S covers p iff every q ≤ p has some r ≤ q with (r → p) ∈ S."""
    if not cat.is_poset():
        raise NotAPoset("dense topology needs a poset category")
    cov = [{s for s in all_sieves(cat, p) if is_dense_below(cat, s)} for p in range(cat.n_objects)]
    basis = tuple(tuple(minimal_sieves(c)) for c in cov)
    return validate_topology(cat, cov, "dense-poset", Presentation(basis))


def minimal_sieves(family: Iterable[Sieve]) -> list[Sieve]:
    fam = sorted(family, key=_sort_key)
    return [s for s in fam if not any(t.arrows < s.arrows for t in fam)]


def generate_topology(cat: FiniteCategory, bcov: Presentation | Sequence[Iterable[Sieve]]) -> Topology:
    """Superset closure of a basis; raises if the closure is not a topology."""
    pres = bcov if isinstance(bcov, Presentation) else Presentation(tuple(tuple(b) for b in bcov))
    bad = []
    for a, basics in enumerate(pres.bcov):
        for r in basics:
            if r.at != a or not is_sieve(cat, a, r.arrows):
                bad.append(Violation("NotASieve", {"object": cat.objects[a], "sieve": r.names(cat)}))
    if bad:
        raise TopologyError(bad)
    cov = [
        {s for s in all_sieves(cat, a) if any(r.arrows <= s.arrows for r in pres.bcov[a])}
        for a in range(cat.n_objects)
    ]
    violations = topology_violations(cat, cov)
    if violations:
        raise GeneratedFamilyNotATopology(violations)
    return Topology(cat, tuple(frozenset(c) for c in cov), pres, "basis")


def sieves_from_names(cat: FiniteCategory, by_object: Mapping[str, Iterable[Iterable[str]]]) -> list[set[Sieve]]:
    """Per-object sieve families from ``{object: [[arrow, ...], ...]}``."""
    out: list[set[Sieve]] = [set() for _ in range(cat.n_objects)]
    for o, sieves in by_object.items():
        a = cat.obj(str(o))
        for arrows in sieves:
            out[a].add(Sieve(a, frozenset(cat.arrow(str(x)) for x in arrows)))
    return out


def iter_covering(top: Topology) -> Iterator[tuple[int, Sieve]]:
    for a in range(top.cat.n_objects):
        for s in top.covering(a):
            yield a, s
