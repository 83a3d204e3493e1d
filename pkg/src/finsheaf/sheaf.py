"""Separated presheaves, sheaves, the plus construction and sheafification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

from .coverage import Sieve, Topology, largest_subsieve, pullback_sieve
from .errors import NotASheaf
from .presheaf import (
    Elem,
    PowerObject,
    Presheaf,
    PresheafMorphism,
    SmallnessClass,
    Subpresheaf,
    UNBOUNDED,
    homs,
    morphism_from_function,
    power_object,
    presheaf_from_action,
    product,
)
from .search import UnionFind


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: dict[str, Any] | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class CompatibleFamily:
    """A covering sieve at ``at`` and a compatible choice ``x_f`` for each f in it.

    ``choice`` lists ``(f, x_f)`` sorted by arrow index.
    """

    at: int
    sieve: frozenset[int]
    choice: tuple[tuple[int, Elem], ...]

    def value(self, f: int) -> Elem:
        for g, x in self.choice:
            if g == f:
                return x
        raise KeyError(f)

    def as_dict(self) -> dict[int, Elem]:
        return dict(self.choice)


def sieve_presheaf(top: Topology, sieve: Sieve) -> Presheaf:
    """A sieve as a subpresheaf of the representable: arrows in S with domain b, acting by precomposition."""
    cat = top.cat
    fibers = [tuple(f for f in sorted(sieve.arrows) if cat.dom[f] == b) for b in range(cat.n_objects)]
    return presheaf_from_action(cat, fibers, lambda f, g: cat.compose(f, g))


def families_on(P: Presheaf, top: Topology, sieve: Sieve) -> Iterator[CompatibleFamily]:
    """Compatible families on one sieve: natural maps from the sieve into P."""
    for m in homs(sieve_presheaf(top, sieve), P):
        choice = tuple(sorted((f, m.comp[top.cat.dom[f]][f]) for f in sieve.arrows))
        yield CompatibleFamily(sieve.at, sieve.arrows, choice)


def compatible_families(P: Presheaf, top: Topology, a: int) -> list[CompatibleFamily]:
    """All (R, x) with R covering ``a`` and x compatible, covers in canonical order."""
    return [fam for R in top.covering(a) for fam in families_on(P, top, R)]


def restrict_family(P: Presheaf, top: Topology, fam: CompatibleFamily, f: int) -> CompatibleFamily:
    """(R, x)·f = (f*R, g ↦ x_{f∘g})."""
    cat = top.cat
    pb = pullback_sieve(cat, Sieve(fam.at, fam.sieve), f)
    x = fam.as_dict()
    return CompatibleFamily(pb.at, pb.arrows, tuple(sorted((g, x[cat.compose(f, g)]) for g in pb.arrows)))


def agreement_sieve(top: Topology, fam1: CompatibleFamily, fam2: CompatibleFamily) -> Sieve:
    """The largest sieve inside R ∩ T on which the two families agree."""
    x, y = fam1.as_dict(), fam2.as_dict()
    agree = {f for f in fam1.sieve & fam2.sieve if x[f] == y[f]}
    return largest_subsieve(top.cat, fam1.at, agree)


def families_equivalent(top: Topology, fam1: CompatibleFamily, fam2: CompatibleFamily, use_basis: bool = False) -> bool:
    """Some covering (or basic covering) sieve inside R ∩ T carries equal choices."""
    agree = agreement_sieve(top, fam1, fam2)
    if use_basis and top.presentation is not None:
        return any(b.arrows <= agree.arrows for b in top.presentation.bcov[fam1.at])
    return top.covers(agree)


@dataclass
class PlusResult:
    """P⁺ with its quotient map from compatible families and the canonical map η: P → P⁺."""

    presheaf: Presheaf
    quotient: dict[CompatibleFamily, CompatibleFamily]
    classes: dict[CompatibleFamily, list[CompatibleFamily]]
    eta: PresheafMorphism


def plus(P: Presheaf, top: Topology, use_basis: bool = False) -> PlusResult:
    """Compatible families modulo agreement on a common covering refinement.

    Each class is represented by its first member in enumeration order.
    """
    cat = top.cat
    quotient: dict[CompatibleFamily, CompatibleFamily] = {}
    classes: dict[CompatibleFamily, list[CompatibleFamily]] = {}
    fibers = []
    for a in range(cat.n_objects):
        fams = compatible_families(P, top, a)
        uf = UnionFind(len(fams))
        for i in range(len(fams)):
            for j in range(i + 1, len(fams)):
                if uf.find(i) != uf.find(j) and families_equivalent(top, fams[i], fams[j], use_basis):
                    uf.union(i, j)
        reps = []
        for i, fam in enumerate(fams):
            rep = fams[uf.find(i)]
            quotient[fam] = rep
            if rep is fam:
                reps.append(fam)
                classes[fam] = []
            classes[rep].append(fam)
        fibers.append(tuple(reps))
    Pp = presheaf_from_action(cat, fibers, lambda fam, f: quotient[restrict_family(P, top, fam, f)])

    def eta(a: int, x: Elem) -> CompatibleFamily:
        full = top.cat.into(a)
        fam = CompatibleFamily(a, frozenset(full), tuple(sorted((f, P.restrict(x, f)) for f in full)))
        return quotient[fam]

    return PlusResult(Pp, quotient, classes, morphism_from_function(P, Pp, eta, validate=False))


@dataclass
class Sheafification:
    sheaf: Presheaf
    unit: PresheafMorphism
    first: PlusResult
    second: PlusResult


def sheafify(P: Presheaf, top: Topology, use_basis: bool = False) -> Sheafification:
    """P⁺⁺ with unit P → P⁺ → P⁺⁺."""
    first = plus(P, top, use_basis)
    second = plus(first.presheaf, top, use_basis)
    return Sheafification(second.presheaf, first.eta.then(second.eta), first, second)


def factorizations(result: Sheafification, h: PresheafMorphism) -> list[PresheafMorphism]:
    """Every h̄: P⁺⁺ → G with h̄ ∘ unit = h (exhaustive, pinned on the image of the unit)."""
    unit, G = result.unit, h.dst
    forced: list[dict] = [{} for _ in range(G.cat.n_objects)]
    for a, fb in enumerate(unit.src.fibers):
        for x in fb:
            forced[a].setdefault(unit.comp[a][x], set()).add(h.comp[a][x])

    def allowed(a: int, e: Elem):
        if e in forced[a]:
            vals = forced[a][e]
            return list(vals) if len(vals) == 1 else []
        return G.fibers[a]

    return [m for m in homs(result.sheaf, G, allowed) if unit.then(m) == h]


# ---------------------------------------------------------------------------
# sheaf conditions


def is_separated(P: Presheaf, top: Topology) -> CheckResult:
    """Elements agreeing on a covering sieve are equal."""
    cat = top.cat
    for a in range(cat.n_objects):
        fb = P.fibers[a]
        for R in top.covering(a):
            arrows = sorted(R.arrows)
            for i, x in enumerate(fb):
                for y in fb[i + 1:]:
                    if all(P.restrict(x, f) == P.restrict(y, f) for f in arrows):
                        return CheckResult(
                            False,
                            {"object": cat.objects[a], "cover": R.names(cat), "elements": [x, y]},
                        )
    return CheckResult(True)


def glueings(P: Presheaf, fam: CompatibleFamily) -> list[Elem]:
    x = fam.as_dict()
    return [e for e in P.fibers[fam.at] if all(P.restrict(e, f) == v for f, v in x.items())]


def is_sheaf(P: Presheaf, top: Topology) -> CheckResult:
    """Separated, and every compatible family on a cover has a glueing."""
    sep = is_separated(P, top)
    if not sep:
        return sep
    cat = top.cat
    for a in range(cat.n_objects):
        for fam in compatible_families(P, top, a):
            if not glueings(P, fam):
                return CheckResult(
                    False,
                    {
                        "object": cat.objects[a],
                        "cover": Sieve(a, fam.sieve).names(cat),
                        "family": [[cat.arrows[f], v] for f, v in fam.choice],
                    },
                )
    return CheckResult(True)


def require_sheaf(P: Presheaf, top: Topology, what: str = "presheaf") -> None:
    res = is_sheaf(P, top)
    if not res:
        raise NotASheaf(f"{what} is not a sheaf: {res.witness}")


def is_locally_surjective(F: PresheafMorphism, top: Topology) -> CheckResult:
    """Every x is hit after restriction along some covering sieve."""
    cat, X = top.cat, F.dst
    image = [set(c.values()) for c in F.comp]
    for a in range(cat.n_objects):
        for x in X.fibers[a]:
            hit = {f for f in cat.into(a) if X.restrict(x, f) in image[cat.dom[f]]}
            if not top.covers_arrows(a, hit):
                return CheckResult(False, {"object": cat.objects[a], "element": x})
    return CheckResult(True)


# ---------------------------------------------------------------------------
# power object in sheaves


@dataclass
class SheafPowerObject:
    base: Presheaf
    presheaf: Presheaf
    membership: Subpresheaf  # of product(base, presheaf)
    quotient: dict
    presheaf_power: PowerObject = field(repr=False)


def _covers_from(top: Topology, A: frozenset, B: frozenset, X: Presheaf) -> bool:
    cat = top.cat
    for f, x in A:
        b = cat.dom[f]
        hit = {g for g in cat.into(b) if (cat.compose(f, g), X.restrict(x, g)) in B}
        if not top.covers_arrows(b, hit):
            return False
    return True


def power_equivalent(top: Topology, X: Presheaf, A: frozenset, B: frozenset) -> bool:
    """A ~ B: every (f, x) of each is locally matched in the other."""
    return _covers_from(top, A, B, X) and _covers_from(top, B, A, X)


def sheaf_power_object(X: Presheaf, top: Topology, smallness: SmallnessClass = UNBOUNDED) -> SheafPowerObject:
    """The presheaf power object modulo local bisimulation; x ∈ [A] iff {f : (f, x·f) ∈ A} covers."""
    require_sheaf(X, top, "base")
    cat = top.cat
    po = power_object(X, smallness)
    P = po.presheaf
    quotient: dict = {}
    fibers = []
    for c in range(cat.n_objects):
        fb = P.fibers[c]
        uf = UnionFind(len(fb))
        for i in range(len(fb)):
            for j in range(i + 1, len(fb)):
                if uf.find(i) != uf.find(j) and power_equivalent(top, X, fb[i], fb[j]):
                    uf.union(i, j)
        for i, A in enumerate(fb):
            quotient[(c, A)] = fb[uf.find(i)]
        fibers.append(tuple(A for i, A in enumerate(fb) if uf.find(i) == i))
    Q = presheaf_from_action(cat, fibers, lambda A, f: quotient[(cat.dom[f], P.restrict(A, f))])
    XQ = product(X, Q)
    member = [
        {
            (x, A)
            for (x, A) in XQ.fibers[c]
            if top.covers_arrows(c, {f for f in cat.into(c) if (f, X.restrict(x, f)) in A})
        }
        for c in range(cat.n_objects)
    ]
    return SheafPowerObject(X, Q, Subpresheaf(XQ, member), quotient, po)
