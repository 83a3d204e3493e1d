"""Presheaves of finite sets and their morphisms.

Covers the positive Heyting structure (images, pullback of subobjects and
universal quantification along a map), the free/forgetful adjunction between
families over the objects and presheaves, the maps ``(r, s)_!``, dependent
products along small maps and the power object of small subpresheaves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .category import FiniteCategory
from .errors import ElementNotInFiber, NotSmall, PresheafError, ShapeMismatch, Violation
from .search import canonical_order, closed_subsets

Elem = Hashable


class Presheaf:
    """Contravariant functor from a finite category to finite sets.

    ``fibers[a]`` lists X(a) in a fixed order; ``restriction`` maps
    ``(f, x)`` with ``x ∈ X(cod f)`` to ``x·f ∈ X(dom f)``. Identity
    restrictions may be omitted.
    """

    __slots__ = ("cat", "fibers", "_r", "_index", "_hash")

    def __init__(
        self,
        cat: FiniteCategory,
        fibers: Sequence[Iterable[Elem]],
        restriction: Mapping[tuple[int, Elem], Elem],
        validate: bool = True,
    ):
        self.cat = cat
        self.fibers: tuple[tuple[Elem, ...], ...] = tuple(tuple(fb) for fb in fibers)
        self._index = tuple({x: i for i, x in enumerate(fb)} for fb in self.fibers)
        r = dict(restriction)
        for a in range(cat.n_objects):
            ida = cat.identity[a]
            for x in self.fibers[a]:
                r.setdefault((ida, x), x)
        self._r = r
        self._hash: int | None = None
        if validate:
            violations = self.violations()
            if violations:
                raise PresheafError(violations)

    # -- basic access -------------------------------------------------------

    def restrict(self, x: Elem, f: int) -> Elem:
        return self._r[f, x]

    def fiber(self, a: int) -> tuple[Elem, ...]:
        return self.fibers[a]

    def has(self, a: int, x: Elem) -> bool:
        return x in self._index[a]

    def position(self, a: int, x: Elem) -> int:
        try:
            return self._index[a][x]
        except KeyError:
            raise ElementNotInFiber((self.cat.objects[a], x)) from None

    def elements(self) -> Iterator[tuple[int, Elem]]:
        for a, fb in enumerate(self.fibers):
            for x in fb:
                yield a, x

    def size(self) -> int:
        return sum(len(fb) for fb in self.fibers)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(fb) for fb in self.fibers)

    def violations(self) -> list[Violation]:
        cat = self.cat
        out: list[Violation] = []
        for a, fb in enumerate(self.fibers):
            if len(set(fb)) != len(fb):
                out.append(Violation("DuplicateElement", {"object": cat.objects[a]}))
        for f in range(cat.n_arrows):
            b, a = cat.dom[f], cat.cod[f]
            for x in self.fibers[a]:
                y = self._r.get((f, x), _MISSING)
                if y is _MISSING:
                    out.append(Violation("MissingRestriction", {"arrow": cat.arrows[f], "element": x}))
                elif not self.has(b, y):
                    out.append(Violation("RestrictionOutsideFiber", {"arrow": cat.arrows[f], "element": x}))
        if out:
            return out
        for a in range(cat.n_objects):
            for x in self.fibers[a]:
                if self._r[cat.identity[a], x] != x:
                    out.append(Violation("IdentityRestriction", {"object": cat.objects[a], "element": x}))
                for f in cat.into(a):
                    for g in cat.into(cat.dom[f]):
                        if self._r[g, self._r[f, x]] != self._r[cat.compose(f, g), x]:
                            out.append(
                                Violation(
                                    "Functoriality",
                                    {"element": x, "f": cat.arrows[f], "g": cat.arrows[g]},
                                )
                            )
        return out

    # -- identity ------------------------------------------------------------

    def _key(self) -> tuple:
        return (self.cat, self.fibers, frozenset(self._r.items()))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Presheaf) and self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self) -> str:
        return f"Presheaf(sizes={self.sizes()})"


_MISSING = object()


# ---------------------------------------------------------------------------
# builders


def presheaf_from_action(
    cat: FiniteCategory, fibers: Sequence[Iterable[Elem]], action: Callable[[Elem, int], Elem]
) -> Presheaf:
    fibers = [tuple(fb) for fb in fibers]
    restriction = {(f, x): action(x, f) for f in range(cat.n_arrows) for x in fibers[cat.cod[f]]}
    return Presheaf(cat, fibers, restriction)


def terminal(cat: FiniteCategory) -> Presheaf:
    return presheaf_from_action(cat, [("*",)] * cat.n_objects, lambda x, f: "*")


def empty(cat: FiniteCategory) -> Presheaf:
    return Presheaf(cat, [()] * cat.n_objects, {})


def constant(cat: FiniteCategory, elems: Sequence[Elem]) -> Presheaf:
    return presheaf_from_action(cat, [tuple(elems)] * cat.n_objects, lambda x, f: x)


def representable(cat: FiniteCategory, c: int) -> Presheaf:
    """y(c): arrows e → c, named by arrow id, acting by precomposition."""
    fibers = [tuple(cat.arrows[g] for g in cat.hom(e, c)) for e in range(cat.n_objects)]
    return presheaf_from_action(cat, fibers, lambda g, f: cat.arrows[cat.compose(cat.arrow(g), f)])


def product(X: Presheaf, Y: Presheaf) -> Presheaf:
    cat = X.cat
    fibers = [tuple((x, y) for x in X.fibers[a] for y in Y.fibers[a]) for a in range(cat.n_objects)]
    return presheaf_from_action(cat, fibers, lambda p, f: (X.restrict(p[0], f), Y.restrict(p[1], f)))


# ---------------------------------------------------------------------------
# subpresheaves


class Subpresheaf:
    """A subset of each fiber, closed under restriction."""

    __slots__ = ("of", "member")

    def __init__(self, of: Presheaf, member: Sequence[Iterable[Elem]], validate: bool = True):
        self.of = of
        self.member: tuple[frozenset, ...] = tuple(frozenset(m) for m in member)
        if validate:
            cat = of.cat
            bad = []
            for a, m in enumerate(self.member):
                for x in m:
                    if not of.has(a, x):
                        bad.append(Violation("NotInFiber", {"object": cat.objects[a], "element": x}))
                        continue
                    for f in cat.into(a):
                        if of.restrict(x, f) not in self.member[cat.dom[f]]:
                            bad.append(
                                Violation("NotClosed", {"element": x, "arrow": cat.arrows[f]})
                            )
            if bad:
                raise PresheafError(bad, "subpresheaf")

    @classmethod
    def full(cls, X: Presheaf) -> "Subpresheaf":
        return cls(X, X.fibers, validate=False)

    @classmethod
    def bottom(cls, X: Presheaf) -> "Subpresheaf":
        return cls(X, [()] * X.cat.n_objects, validate=False)

    def contains(self, a: int, x: Elem) -> bool:
        return x in self.member[a]

    def __le__(self, other: "Subpresheaf") -> bool:
        return all(m <= n for m, n in zip(self.member, other.member))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subpresheaf) and self.of == other.of and self.member == other.member

    def __hash__(self) -> int:
        return hash(self.member)

    def size(self) -> int:
        return sum(len(m) for m in self.member)

    def meet(self, other: "Subpresheaf") -> "Subpresheaf":
        return Subpresheaf(self.of, [m & n for m, n in zip(self.member, other.member)], validate=False)

    def join(self, other: "Subpresheaf") -> "Subpresheaf":
        return Subpresheaf(self.of, [m | n for m, n in zip(self.member, other.member)], validate=False)

    def as_presheaf(self) -> Presheaf:
        X = self.of
        fibers = [tuple(x for x in X.fibers[a] if x in self.member[a]) for a in range(X.cat.n_objects)]
        restriction = {
            (f, x): X.restrict(x, f) for f in range(X.cat.n_arrows) for x in fibers[X.cat.cod[f]]
        }
        return Presheaf(X.cat, fibers, restriction, validate=False)

    def inclusion(self) -> "PresheafMorphism":
        P = self.as_presheaf()
        return PresheafMorphism(P, self.of, [{x: x for x in fb} for fb in P.fibers], validate=False)

    def __repr__(self) -> str:
        return f"Subpresheaf(sizes={tuple(len(m) for m in self.member)})"


def all_subpresheaves(X: Presheaf) -> list[Subpresheaf]:
    """Every subpresheaf of X, smallest first (a linear extension of inclusion)."""
    cat = X.cat
    items = list(X.elements())
    succ = lambda it: [(cat.dom[f], X.restrict(it[1], f)) for f in cat.into(it[0])]
    subs = canonical_order(closed_subsets(items, succ), items)
    out = []
    for s in subs:
        member: list[set] = [set() for _ in range(cat.n_objects)]
        for a, x in s:
            member[a].add(x)
        out.append(Subpresheaf(X, member, validate=False))
    return out


def generated_subpresheaf(X: Presheaf, gens: Iterable[tuple[int, Elem]]) -> Subpresheaf:
    cat = X.cat
    member: list[set] = [set() for _ in range(cat.n_objects)]
    for a, x in gens:
        for f in cat.into(a):
            member[cat.dom[f]].add(X.restrict(x, f))
    return Subpresheaf(X, member, validate=False)


# ---------------------------------------------------------------------------
# morphisms


class PresheafMorphism:
    """Natural transformation; ``comp[a]`` maps X(a) to Y(a)."""

    __slots__ = ("src", "dst", "comp")

    def __init__(self, src: Presheaf, dst: Presheaf, comp: Sequence[Mapping[Elem, Elem]], validate: bool = True):
        self.src = src
        self.dst = dst
        self.comp: tuple[dict, ...] = tuple(dict(c) for c in comp)
        if validate:
            violations = self.violations()
            if violations:
                raise PresheafError(violations, "morphism")

    def __call__(self, a: int, x: Elem) -> Elem:
        return self.comp[a][x]

    def violations(self) -> list[Violation]:
        X, Y, cat = self.src, self.dst, self.src.cat
        out = []
        for a in range(cat.n_objects):
            for x in X.fibers[a]:
                if x not in self.comp[a] or not Y.has(a, self.comp[a][x]):
                    out.append(Violation("BadComponent", {"object": cat.objects[a], "element": x}))
        if out:
            return out
        for a in range(cat.n_objects):
            for x in X.fibers[a]:
                for f in cat.into(a):
                    if self.comp[cat.dom[f]][X.restrict(x, f)] != Y.restrict(self.comp[a][x], f):
                        out.append(Violation("Naturality", {"element": x, "arrow": cat.arrows[f]}))
        return out

    def _key(self) -> tuple:
        return (self.src, self.dst, tuple(frozenset(c.items()) for c in self.comp))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PresheafMorphism) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def then(self, other: "PresheafMorphism") -> "PresheafMorphism":
        """``other ∘ self``."""
        return PresheafMorphism(
            self.src,
            other.dst,
            [{x: other.comp[a][y] for x, y in self.comp[a].items()} for a in range(len(self.comp))],
            validate=False,
        )

    def fiber(self, a: int, y: Elem) -> list[Elem]:
        return [x for x in self.src.fibers[a] if self.comp[a][x] == y]

    def is_componentwise_surjective(self) -> bool:
        return all(set(c.values()) >= set(fb) for c, fb in zip(self.comp, self.dst.fibers))

    def is_mono(self) -> bool:
        return all(len(set(c.values())) == len(c) for c in self.comp)

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_componentwise_surjective()

    def max_fiber(self) -> int:
        best = 0
        for a, fb in enumerate(self.dst.fibers):
            counts: dict = {}
            for y in self.comp[a].values():
                counts[y] = counts.get(y, 0) + 1
            best = max([best, *counts.values()])
        return best

    def __repr__(self) -> str:
        return f"PresheafMorphism({self.src!r} -> {self.dst!r})"


def identity_morphism(X: Presheaf) -> PresheafMorphism:
    return PresheafMorphism(X, X, [{x: x for x in fb} for fb in X.fibers], validate=False)


def morphism_from_function(X: Presheaf, Y: Presheaf, fn: Callable[[int, Elem], Elem], validate: bool = True) -> PresheafMorphism:
    return PresheafMorphism(X, Y, [{x: fn(a, x) for x in X.fibers[a]} for a in range(X.cat.n_objects)], validate)


def projection(P: Presheaf, i: int, target: Presheaf) -> PresheafMorphism:
    return morphism_from_function(P, target, lambda a, p: p[i], validate=False)


def homs(
    X: Presheaf,
    Y: Presheaf,
    allowed: Callable[[int, Elem], Iterable[Elem]] | None = None,
) -> Iterator[PresheafMorphism]:
    """All natural transformations X → Y, by backtracking with naturality pruning.

    ``allowed(a, x)`` optionally narrows the candidate images of ``x``.
    """
    cat = X.cat
    elems = list(X.elements())
    pos = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    # checks[i]: (j, g) meaning value[j] == value[i]·g   or   (j, g, True): value[i] == value[j]·g
    checks: list[list[tuple[int, int, bool]]] = [[] for _ in range(n)]
    for i, (c, x) in enumerate(elems):
        for g in cat.into(c):
            if cat.is_identity(g):
                continue
            j = pos[(cat.dom[g], X.restrict(x, g))]
            # constraint value[j] == value[i]·g, attached to the later position
            if j <= i:
                checks[i].append((j, g, False))
            else:
                checks[j].append((i, g, True))
    cands = [
        list(allowed(a, x)) if allowed is not None else list(Y.fibers[a]) for a, x in elems
    ]
    value: list[Elem] = [None] * n

    def ok(i: int, v: Elem) -> bool:
        for j, g, later_is_restriction in checks[i]:
            if later_is_restriction:
                # value[i] must equal value[j]·g
                if v != Y.restrict(value[j], g):
                    return False
            else:
                other = v if j == i else value[j]
                if other != Y.restrict(v, g):
                    return False
        return True

    def rec(i: int) -> Iterator[None]:
        if i == n:
            yield None
            return
        for v in cands[i]:
            if ok(i, v):
                value[i] = v
                yield from rec(i + 1)

    for _ in rec(0):
        comp: list[dict] = [{} for _ in range(cat.n_objects)]
        for (a, x), v in zip(elems, value):
            comp[a][x] = v
        yield PresheafMorphism(X, Y, comp, validate=False)


# ---------------------------------------------------------------------------
# smallness


@dataclass(frozen=True)
class SmallnessClass:
    """Maps are small when every fiber has at most ``bound`` elements (None: no bound)."""

    bound: int | None = None

    def admits(self, n: int) -> bool:
        return self.bound is None or n <= self.bound

    def is_small(self, F: PresheafMorphism) -> bool:
        return self.admits(F.max_fiber())

    def is_small_function(self, fn: Mapping[Any, Any]) -> bool:
        counts: dict = {}
        for v in fn.values():
            counts[v] = counts.get(v, 0) + 1
        return self.admits(max(counts.values(), default=0))

    def describe(self) -> str:
        return "unbounded" if self.bound is None else f"fibers<={self.bound}"


UNBOUNDED = SmallnessClass()


def require_small(F: PresheafMorphism, smallness: SmallnessClass) -> None:
    if not smallness.is_small(F):
        raise NotSmall(f"max fiber {F.max_fiber()} exceeds {smallness.describe()}")


# ---------------------------------------------------------------------------
# fibers along a map, Heyting structure


def m_fiber(F: PresheafMorphism, a: int, x: Elem, sieve: Iterable[int] | None = None) -> list[tuple[int, Elem]]:
    """Pairs (f, y) with cod f = a, y ∈ Y(dom f) and F(y) = x·f, optionally with f in a sieve."""
    X, Y, cat = F.dst, F.src, F.src.cat
    if not X.has(a, x):
        raise ElementNotInFiber((cat.objects[a], x))
    arrows = cat.into(a) if sieve is None else sorted(sieve)
    return [
        (f, y)
        for f in arrows
        for y in Y.fibers[cat.dom[f]]
        if F.comp[cat.dom[f]][y] == X.restrict(x, f)
    ]


def m_fiber_presheaf(F: PresheafMorphism, a: int, x: Elem, sieve: Iterable[int] | None = None) -> Presheaf:
    """The same pairs as a presheaf: fibre at b holds pairs with dom f = b; (f, y)·g = (f∘g, y·g)."""
    cat, Y = F.src.cat, F.src
    pairs = m_fiber(F, a, x, sieve)
    fibers: list[list] = [[] for _ in range(cat.n_objects)]
    for f, y in pairs:
        fibers[cat.dom[f]].append((f, y))
    restriction = {
        (g, (f, y)): (cat.compose(f, g), Y.restrict(y, g))
        for f, y in pairs
        for g in cat.into(cat.dom[f])
    }
    return Presheaf(cat, fibers, restriction, validate=False)


def forall_along(F: PresheafMorphism, A: Subpresheaf) -> Subpresheaf:
    """∀_F(A)(a) = {x : every (f, y) over x has y ∈ A}."""
    X, cat = F.dst, F.src.cat
    member = [
        {x for x in X.fibers[a] if all(y in A.member[cat.dom[f]] for f, y in m_fiber(F, a, x))}
        for a in range(cat.n_objects)
    ]
    return Subpresheaf(X, member, validate=False)


def exists_along(F: PresheafMorphism, A: Subpresheaf) -> Subpresheaf:
    member = [{F.comp[a][y] for y in A.member[a]} for a in range(F.src.cat.n_objects)]
    return Subpresheaf(F.dst, member, validate=False)


def pullback_sub(F: PresheafMorphism, C: Subpresheaf) -> Subpresheaf:
    Y = F.src
    member = [{y for y in Y.fibers[a] if F.comp[a][y] in C.member[a]} for a in range(Y.cat.n_objects)]
    return Subpresheaf(Y, member, validate=False)


def image_factorization(F: PresheafMorphism) -> tuple[PresheafMorphism, Subpresheaf]:
    """F = inclusion ∘ cover, with the image computed fiberwise."""
    image = exists_along(F, Subpresheaf.full(F.src))
    cover = PresheafMorphism(F.src, image.as_presheaf(), F.comp, validate=False)
    return cover, image


# ---------------------------------------------------------------------------
# families over the objects and the free presheaf on them


@dataclass(frozen=True)
class FamilyOverC0:
    """A finite set with each element anchored at an object."""

    elements: tuple[Elem, ...]
    anchor: tuple[int, ...]

    @classmethod
    def of(cls, pairs: Iterable[tuple[Elem, int]]) -> "FamilyOverC0":
        pairs = list(pairs)
        return cls(tuple(e for e, _ in pairs), tuple(a for _, a in pairs))

    def sigma(self, b: Elem) -> int:
        return self.anchor[self.elements.index(b)]

    def items(self) -> Iterator[tuple[Elem, int]]:
        return zip(self.elements, self.anchor)


def pi_shriek(cat: FiniteCategory, B: FamilyOverC0) -> Presheaf:
    """Free presheaf: at a, pairs (b, f: a → σ(b)); (b, f)·g = (b, f∘g)."""
    fibers = [
        tuple((b, f) for b, s in B.items() for f in cat.hom(a, s)) for a in range(cat.n_objects)
    ]
    return presheaf_from_action(cat, fibers, lambda p, g: (p[0], cat.compose(p[1], g)))


def pi_star(Y: Presheaf) -> FamilyOverC0:
    """Forgetful functor: the disjoint union of the fibers, anchored at their object."""
    return FamilyOverC0.of(((a, y), a) for a, y in Y.elements())


def counit(Y: Presheaf) -> PresheafMorphism:
    """π_!π*Y → Y, ((b, y), f) ↦ y·f."""
    cat = Y.cat
    src = pi_shriek(cat, pi_star(Y))
    return morphism_from_function(src, Y, lambda a, p: Y.restrict(p[0][1], p[1]), validate=False)


def family_maps(B: FamilyOverC0, Y: Presheaf) -> Iterator[dict]:
    """All maps B → π*Y over the objects, as ``{b: y ∈ Y(σ b)}``."""
    def rec(i: int, acc: dict) -> Iterator[dict]:
        if i == len(B.elements):
            yield dict(acc)
            return
        b = B.elements[i]
        for y in Y.fibers[B.anchor[i]]:
            acc[b] = y
            yield from rec(i + 1, acc)
        acc.pop(b, None)

    yield from rec(0, {})


def transpose_to_family(L: PresheafMorphism, B: FamilyOverC0) -> dict:
    cat = L.src.cat
    return {b: L.comp[s][(b, cat.identity[s])] for b, s in B.items()}


def transpose_from_family(cat: FiniteCategory, B: FamilyOverC0, Y: Presheaf, h: Mapping) -> PresheafMorphism:
    src = pi_shriek(cat, B)
    return morphism_from_function(src, Y, lambda a, p: Y.restrict(h[p[0]], p[1]), validate=False)


def shriek_map(
    cat: FiniteCategory,
    B: FamilyOverC0,
    A: FamilyOverC0,
    r: Mapping[Elem, Elem],
    s: Mapping[Elem, int],
) -> PresheafMorphism:
    """(r, s)_!: π_!B → π_!A, (b, f) ↦ (r b, s_b∘f).

    Requires dom(s_b) = σ_B(b) and cod(s_b) = σ_A(r b).
    """
    sigma_a = dict(A.items())
    for b, sb in B.items():
        if r[b] not in sigma_a or cat.dom[s[b]] != sb or cat.cod[s[b]] != sigma_a[r[b]]:
            raise ShapeMismatch(f"element {b!r}: s_b does not run from σ_B(b) to σ_A(r b)")
    src, dst = pi_shriek(cat, B), pi_shriek(cat, A)
    return morphism_from_function(src, dst, lambda a, p: (r[p[0]], cat.compose(s[p[0]], p[1])), validate=False)


@dataclass
class CoveringSquare:
    """Quasi-pullback π_!C → Z over π_!B → Y with left side (k, l)_!."""

    C: FamilyOverC0
    k: dict
    l: dict
    left: PresheafMorphism
    top: PresheafMorphism
    pullback: Presheaf
    commutes: bool
    comparison_surjective: bool
    k_factor_fiber: int
    k_small: bool

    @property
    def ok(self) -> bool:
        return self.commutes and self.comparison_surjective and self.k_small


def cover_by_shriek(
    F: PresheafMorphism,
    L: PresheafMorphism,
    B: FamilyOverC0,
    smallness: SmallnessClass = UNBOUNDED,
) -> CoveringSquare:
    """Cover the pullback of a small F: Z → Y along L: π_!B → Y by a free presheaf.

    With S the pullback, C = π*S; k sends ((b, f), z) to b and l to f. The
    square is checked to commute and to be a quasi-pullback, and k is checked
    to factor as a pullback of F (fibers bounded by the smallness class)
    followed by a pullback of the codomain map.
    """
    require_small(F, smallness)
    cat = F.src.cat
    Z, Y = F.src, F.dst
    PB = L.src
    s_fibers = [
        tuple((p, z) for p in PB.fibers[a] for z in Z.fibers[a] if L.comp[a][p] == F.comp[a][z])
        for a in range(cat.n_objects)
    ]
    S = presheaf_from_action(cat, s_fibers, lambda pz, g: (PB.restrict(pz[0], g), Z.restrict(pz[1], g)))
    C = pi_star(S)
    k = {c: c[1][0][0] for c in C.elements}
    l = {c: c[1][0][1] for c in C.elements}
    left = shriek_map(cat, C, B, k, l)
    top = morphism_from_function(left.src, Z, lambda a, cg: Z.restrict(cg[0][1][1], cg[1]), validate=False)
    commutes = left.then(L) == top.then(F)
    comparison_surjective = all(
        {(left.comp[a][e], top.comp[a][e]) for e in left.src.fibers[a]} == set(s_fibers[a])
        for a in range(cat.n_objects)
    )
    # first factor C → π*π_!B, c ↦ (a, (b, f)): its fibers are fibers of F
    counts: dict = {}
    for c, a in C.items():
        key = (a, c[1][0])
        counts[key] = counts.get(key, 0) + 1
    factor = max(counts.values(), default=0)
    # the second factor π*π_!B → B is a pullback of cod, small by standing hypothesis
    return CoveringSquare(
        C, k, l, left, top, S, commutes, comparison_surjective, factor, smallness.admits(factor)
    )


# ---------------------------------------------------------------------------
# dependent products along a small map


def pi_functor(
    F: PresheafMorphism, G: PresheafMorphism, smallness: SmallnessClass = UNBOUNDED
) -> PresheafMorphism:
    """Π_F(G) → X for F: Y → X small and G: B → Y.

    The fibre over x ∈ X(a) consists of the natural choice functions s
    assigning to each (f, y) over x an element of G⁻¹(y) ⊆ B(dom f).
    Elements are pairs (x, s) with s a tuple aligned with ``m_fiber(F, a, x)``.
    """
    require_small(F, smallness)
    cat, X = F.src.cat, F.dst
    fibers = [
        [(x, s) for x in X.fibers[a] for s in natural_sections(F, a, x, G.src, lambda b, fy: G.fiber(b, fy[1]))]
        for a in range(cat.n_objects)
    ]
    P = presheaf_from_action(cat, fibers, lambda el, h: reindex_section(F, el[0], el[1], h))
    return morphism_from_function(P, X, lambda a, el: el[0], validate=False)


def natural_sections(
    F: PresheafMorphism,
    a: int,
    x: Elem,
    Z: Presheaf,
    allowed: Callable[[int, tuple[int, Elem]], Iterable[Elem]] | None = None,
) -> Iterator[tuple]:
    """Natural maps Y^M_x → Z as tuples aligned with ``m_fiber(F, a, x)``."""
    cat = F.src.cat
    pairs = m_fiber(F, a, x)
    for s in homs(m_fiber_presheaf(F, a, x), Z, allowed):
        yield tuple(s.comp[cat.dom[f]][(f, y)] for f, y in pairs)


def reindex_section(F: PresheafMorphism, x: Elem, s: tuple, h: int) -> tuple[Elem, tuple]:
    """(x, s)·h = (x·h, (g, y) ↦ s(h∘g, y))."""
    cat, X = F.src.cat, F.dst
    table = dict(zip(m_fiber(F, cat.cod[h], x), s))
    xh = X.restrict(x, h)
    return xh, tuple(table[(cat.compose(h, g), y)] for g, y in m_fiber(F, cat.dom[h], xh))


# ---------------------------------------------------------------------------
# power object of small subpresheaves


@dataclass
class PowerObject:
    base: Presheaf
    presheaf: Presheaf
    membership: Subpresheaf  # of product(base, presheaf)
    smallness: SmallnessClass = field(default=UNBOUNDED)

    def classify(self, R: Subpresheaf, Y: Presheaf) -> PresheafMorphism:
        """The map Y → ℙs(X) sending y to {(g, x) : (x, y·g) ∈ R}."""
        X, cat = self.base, self.base.cat

        def rho(c: int, y: Elem) -> frozenset:
            return frozenset(
                (g, x)
                for g in cat.into(c)
                for x in X.fibers[cat.dom[g]]
                if (x, Y.restrict(y, g)) in R.member[cat.dom[g]]
            )

        return morphism_from_function(Y, self.presheaf, rho, validate=False)

    def pullback_of_membership(self, rho: PresheafMorphism, Y: Presheaf) -> Subpresheaf:
        XY = product(self.base, Y)
        member = [
            {(x, y) for (x, y) in XY.fibers[a] if (x, rho.comp[a][y]) in self.membership.member[a]}
            for a in range(Y.cat.n_objects)
        ]
        return Subpresheaf(XY, member, validate=False)

    def classifying_maps(self, R: Subpresheaf, Y: Presheaf) -> list[PresheafMorphism]:
        """Every morphism Y → ℙs(X) pulling membership back to R (exhaustive)."""
        return [rho for rho in homs(Y, self.presheaf) if self.pullback_of_membership(rho, Y) == R]


def _is_small_relation(member: Iterable[tuple[int, Elem]], smallness: SmallnessClass) -> bool:
    counts: dict = {}
    for g, _ in member:
        counts[g] = counts.get(g, 0) + 1
    return smallness.admits(max(counts.values(), default=0))


def power_object(X: Presheaf, smallness: SmallnessClass = UNBOUNDED) -> PowerObject:
    """ℙs(X)(c) = small subpresheaves of y(c) × X, stored as sets of pairs (g, x).

    Restriction along f: d → c is A·f = {(g, x) : (f∘g, x) ∈ A}; x ∈ A iff (id_c, x) ∈ A.
    """
    cat = X.cat
    fibers = []
    for c in range(cat.n_objects):
        items = [(g, x) for g in cat.into(c) for x in X.fibers[cat.dom[g]]]
        succ = lambda it: [(cat.compose(it[0], h), X.restrict(it[1], h)) for h in cat.into(cat.dom[it[0]])]
        subs = canonical_order(closed_subsets(items, succ), items)
        fibers.append(tuple(A for A in subs if _is_small_relation(A, smallness)))

    def act(A: frozenset, f: int) -> frozenset:
        d = cat.dom[f]
        return frozenset(
            (g, x) for g in cat.into(d) for x in X.fibers[cat.dom[g]] if (cat.compose(f, g), x) in A
        )

    P = presheaf_from_action(cat, fibers, act)
    XP = product(X, P)
    member = [
        {(x, A) for (x, A) in XP.fibers[c] if (cat.identity[c], x) in A} for c in range(cat.n_objects)
    ]
    return PowerObject(X, P, Subpresheaf(XP, member), smallness)
