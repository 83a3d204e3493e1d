"""Finite categories with dense composition tables.

Objects and arrows are interned to integer indices in declaration order and
every enumeration in the package walks them in that order, so results are
reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Iterable, Mapping, Sequence

from .errors import CategoryError, NotAPartialOrder, UnknownArrow, UnknownObject, Violation


@dataclass(frozen=True)
class FiniteCategory:
    objects: tuple[str, ...]
    arrows: tuple[str, ...]
    dom: tuple[int, ...]
    cod: tuple[int, ...]
    identity: tuple[int, ...]
    # table[g][f] == g∘f when cod(f) == dom(g), else None
    table: tuple[tuple[int | None, ...], ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    # -- lookup -----------------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_arrows(self) -> int:
        return len(self.arrows)

    def obj(self, name: str | int) -> int:
        if isinstance(name, int) and 0 <= name < len(self.objects):
            return name
        try:
            return self._cache.setdefault("obj_ix", {n: i for i, n in enumerate(self.objects)})[name]
        except KeyError:
            raise UnknownObject(name) from None

    def arrow(self, name: str | int) -> int:
        if isinstance(name, int) and 0 <= name < len(self.arrows):
            return name
        try:
            return self._cache.setdefault("arr_ix", {n: i for i, n in enumerate(self.arrows)})[name]
        except KeyError:
            raise UnknownArrow(name) from None

    def compose(self, g: int, f: int) -> int:
        """g∘f (first f, then g)."""
        h = self.table[g][f]
        if h is None:
            raise ValueError(f"{self.arrows[g]}∘{self.arrows[f]} is not composable")
        return h

    def is_identity(self, f: int) -> bool:
        return self.identity[self.dom[f]] == f

    def into(self, a: int) -> tuple[int, ...]:
        """Arrows with codomain ``a``, in index order."""
        cache = self._cache.setdefault("into", {})
        if a not in cache:
            cache[a] = tuple(f for f in range(self.n_arrows) if self.cod[f] == a)
        return cache[a]

    def out_of(self, a: int) -> tuple[int, ...]:
        cache = self._cache.setdefault("out", {})
        if a not in cache:
            cache[a] = tuple(f for f in range(self.n_arrows) if self.dom[f] == a)
        return cache[a]

    def hom(self, b: int, a: int) -> tuple[int, ...]:
        return tuple(f for f in self.into(a) if self.dom[f] == b)

    # -- posets -----------------------------------------------------------

    def is_poset(self) -> bool:
        """Thin and skeletal: at most one arrow b→a, and b→a, a→b only if a == b."""
        if "is_poset" not in self._cache:
            ok = True
            for a in range(self.n_objects):
                for b in range(self.n_objects):
                    n = len(self.hom(b, a))
                    if n > 1 or (a != b and n and self.hom(a, b)):
                        ok = False
            self._cache["is_poset"] = ok
        return self._cache["is_poset"]

    def leq(self, q: int, p: int) -> bool:
        return bool(self.hom(q, p))

    def arrow_between(self, q: int, p: int) -> int:
        (f,) = self.hom(q, p)
        return f

    def describe(self) -> dict[str, Any]:
        """JSON-ready description that :func:`validate_category` accepts back."""
        return {
            "objects": list(self.objects),
            "arrows": [
                {"id": self.arrows[f], "dom": self.objects[self.dom[f]], "cod": self.objects[self.cod[f]]}
                for f in range(self.n_arrows)
            ],
            "identity": {self.objects[a]: self.arrows[self.identity[a]] for a in range(self.n_objects)},
            "compose": [
                [self.arrows[g], self.arrows[f], self.arrows[h]]
                for g in range(self.n_arrows)
                for f in range(self.n_arrows)
                if (h := self.table[g][f]) is not None
            ],
        }


def category_violations(raw: Mapping[str, Any]) -> tuple[list[Violation], FiniteCategory | None]:
    """Check a raw description; returns every violation and the category if there are none."""
    violations: list[Violation] = []
    objects = tuple(str(o) for o in raw.get("objects", ()))
    obj_ix = {o: i for i, o in enumerate(objects)}
    arrow_recs = list(raw.get("arrows", ()))
    names = tuple(str(r["id"]) for r in arrow_recs)
    arr_ix = {n: i for i, n in enumerate(names)}
    if len(obj_ix) != len(objects):
        violations.append(Violation("DuplicateObject", {"objects": sorted(objects)}))
    if len(arr_ix) != len(names):
        violations.append(Violation("DuplicateArrow", {"arrows": sorted(names)}))

    dom: list[int] = []
    cod: list[int] = []
    for r in arrow_recs:
        d, c = str(r["dom"]), str(r["cod"])
        for end, o in (("dom", d), ("cod", c)):
            if o not in obj_ix:
                violations.append(Violation("DanglingEndpoint", {"arrow": str(r["id"]), "end": end, "object": o}))
        dom.append(obj_ix.get(d, -1))
        cod.append(obj_ix.get(c, -1))
    if violations:
        return violations, None

    ident_raw = {str(k): str(v) for k, v in dict(raw.get("identity", {})).items()}
    identity: list[int] = []
    for o in objects:
        i = arr_ix.get(ident_raw.get(o, ""), -1)
        if i < 0 or dom[i] != obj_ix[o] or cod[i] != obj_ix[o]:
            violations.append(Violation("MissingIdentity", {"object": o}))
        identity.append(i)

    n = len(names)
    table: list[list[int | None]] = [[None] * n for _ in range(n)]
    for entry in raw.get("compose", ()):
        g, f, h = (str(x) for x in entry)
        if g not in arr_ix or f not in arr_ix or h not in arr_ix:
            violations.append(Violation("UnknownArrow", {"entry": [g, f, h]}))
            continue
        gi, fi, hi = arr_ix[g], arr_ix[f], arr_ix[h]
        if cod[fi] != dom[gi]:
            violations.append(Violation("UnexpectedComposite", {"first": f, "then": g}))
            continue
        if dom[hi] != dom[fi] or cod[hi] != cod[gi]:
            violations.append(Violation("IllTypedComposite", {"first": f, "then": g, "result": h}))
            continue
        if table[gi][fi] is not None and table[gi][fi] != hi:
            violations.append(Violation("ConflictingComposite", {"first": f, "then": g}))
            continue
        table[gi][fi] = hi

    # identity composites are implied when omitted entirely from the table
    explicit = bool(raw.get("compose"))
    for f in range(n):
        for g in range(n):
            if cod[f] != dom[g] or table[g][f] is not None:
                continue
            if not explicit and (g == identity[cod[f]] or f == identity[dom[g]]):
                table[g][f] = f if g == identity[cod[f]] else g
                continue
            violations.append(Violation("MissingComposite", {"first": names[f], "then": names[g]}))
    if violations:
        return violations, None

    for f in range(n):
        if table[identity[cod[f]]][f] != f or table[f][identity[dom[f]]] != f:
            violations.append(Violation("IdentityLaw", {"arrow": names[f]}))
    for f in range(n):
        for g in range(n):
            if cod[f] != dom[g]:
                continue
            gf = table[g][f]
            for h in range(n):
                if cod[g] != dom[h]:
                    continue
                if table[h][gf] != table[table[h][g]][f]:
                    violations.append(
                        Violation("NonAssociative", {"f": names[f], "g": names[g], "h": names[h]})
                    )
    if violations:
        return violations, None
    cat = FiniteCategory(
        objects=objects,
        arrows=names,
        dom=tuple(dom),
        cod=tuple(cod),
        identity=tuple(identity),
        table=tuple(tuple(row) for row in table),
    )
    return [], cat


def validate_category(raw: Mapping[str, Any]) -> FiniteCategory:
    """Build a validated category or raise :class:`CategoryError` listing every violation.

    ``raw`` has keys ``objects``, ``arrows`` (records with ``id``, ``dom``,
    ``cod``), ``identity`` (object → arrow id) and ``compose`` (triples
    ``[g, f, g∘f]``). If ``compose`` is absent, composites with identities are
    filled in and any other composable pair is reported missing.
    """
    violations, cat = category_violations(raw)
    if violations:
        raise CategoryError(violations)
    assert cat is not None
    return cat


def poset_as_category(elements: Sequence[Any], leq: Iterable[tuple[Any, Any]]) -> FiniteCategory:
    """Category with one arrow q→p for each pair q ≤ p.

    ``leq`` must already be a partial order (reflexive, transitive,
    antisymmetric); see :func:`order_closure` to generate one.
    """
    elems = [str(e) for e in elements]
    pairs = {(str(q), str(p)) for q, p in leq}
    violations: list[Violation] = []
    known = set(elems)
    for q, p in sorted(pairs):
        if q not in known or p not in known:
            violations.append(Violation("UnknownElement", {"pair": [q, p]}))
    for e in elems:
        if (e, e) not in pairs:
            violations.append(Violation("NotReflexive", {"pair": [e, e]}))
    for q, p in sorted(pairs):
        if q != p and (p, q) in pairs:
            violations.append(Violation("NotAntisymmetric", {"pair": [q, p]}))
        for p2, r in sorted(pairs):
            if p2 == p and (q, r) not in pairs:
                violations.append(Violation("NotTransitive", {"pair": [q, r], "via": p}))
    if violations:
        raise NotAPartialOrder(violations)

    arrows = []
    for p in elems:
        for q in elems:
            if (q, p) in pairs:
                name = f"id_{q}" if q == p else f"{q}<={p}"
                arrows.append({"id": name, "dom": q, "cod": p})
    by_pair = {(a["dom"], a["cod"]): a["id"] for a in arrows}
    compose = [
        [by_pair[(q, r)], by_pair[(p, q)], by_pair[(p, r)]]
        for (p, q), (q2, r) in product(by_pair, by_pair)
        if q == q2
    ]
    return validate_category(
        {
            "objects": elems,
            "arrows": arrows,
            "identity": {e: f"id_{e}" for e in elems},
            "compose": compose,
        }
    )


def order_closure(elements: Sequence[Any], pairs: Iterable[tuple[Any, Any]]) -> set[tuple[str, str]]:
    """Reflexive-transitive closure of a relation given by generating pairs."""
    elems = [str(e) for e in elements]
    rel = {(str(q), str(p)) for q, p in pairs} | {(e, e) for e in elems}
    changed = True
    while changed:
        changed = False
        for q, p in list(rel):
            for p2, r in list(rel):
                if p2 == p and (q, r) not in rel:
                    rel.add((q, r))
                    changed = True
    return rel


def discrete_category(n: int) -> FiniteCategory:
    """One object ``"*"`` (n = 1) or ``"0".."n-1"``, identities only."""
    names = ["*"] if n == 1 else [str(i) for i in range(n)]
    return poset_as_category(names, [(e, e) for e in names])


def chain(n: int) -> FiniteCategory:
    """The poset 0 ≤ 1 ≤ … ≤ n-1."""
    elems = [str(i) for i in range(n)]
    return poset_as_category(elems, [(elems[i], elems[j]) for i in range(n) for j in range(i, n)])


def monoid_category(elements: Sequence[str], mult: Mapping[tuple[str, str], str], unit: str) -> FiniteCategory:
    """One-object category of a finite monoid; ``mult[(g, f)]`` is g∘f."""
    return validate_category(
        {
            "objects": ["*"],
            "arrows": [{"id": e, "dom": "*", "cod": "*"} for e in elements],
            "identity": {"*": unit},
            "compose": [[g, f, mult[(g, f)]] for g in elements for f in elements],
        }
    )
