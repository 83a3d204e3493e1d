"""Multi-valued sections and the genericity condition behind fullness.

An mvs of φ: B → A over a base Z is a subpresheaf P ⊆ Z × B whose composite
P → Z × A is a small cover. A family of mvss (each over its own base W_i) is
generic when every mvs Q over every test object Z is refined by some member:
there are U, k: U → Σ W_i and a cover l: U → Z with k*P ≤ l*Q. Taking U to
be the presheaf of all triples (z, i, w) for which w's section is contained in
z's, genericity reduces to that U → Z being a cover, which is what
:func:`check_generic` computes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from .coverage import Topology, trivial_topology
from .errors import PresheafError, Violation
from .presheaf import (
    Elem,
    Presheaf,
    PresheafMorphism,
    SmallnessClass,
    Subpresheaf,
    UNBOUNDED,
    all_subpresheaves,
    product,
    representable,
    require_small,
    terminal,
)

MODES = ("pointwise", "local")


@dataclass
class Mvs:
    phi: PresheafMorphism
    base: Presheaf
    carrier: Subpresheaf  # of product(base, phi.src)
    label: str = "1"

    def members(self) -> list[tuple[str, Elem, Elem]]:
        cat = self.base.cat
        return [
            (cat.objects[a], z, b)
            for a, fb in enumerate(self.carrier.of.fibers)
            for (z, b) in fb
            if (z, b) in self.carrier.member[a]
        ]

    def describe(self) -> dict[str, Any]:
        return {"base": self.label, "members": [[o, z, b] for o, z, b in self.members()]}

    def __le__(self, other: "Mvs") -> bool:
        return self.carrier <= other.carrier


def _image_counts(phi: PresheafMorphism, P: Subpresheaf) -> list[dict]:
    counts: list[dict] = [{} for _ in P.member]
    for a, m in enumerate(P.member):
        for z, b in m:
            key = (z, phi.comp[a][b])
            counts[a][key] = counts[a].get(key, 0) + 1
    return counts


def mvs_violations(
    phi: PresheafMorphism,
    base: Presheaf,
    P: Subpresheaf,
    mode: str = "pointwise",
    top: Topology | None = None,
    smallness: SmallnessClass = UNBOUNDED,
) -> list[Violation]:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    cat = base.cat
    top = top or trivial_topology(cat)
    counts = _image_counts(phi, P)
    out = []
    for a in range(cat.n_objects):
        for z in base.fibers[a]:
            for x in phi.dst.fibers[a]:
                if mode == "pointwise":
                    hit = (z, x) in counts[a]
                else:
                    arrows = {
                        f
                        for f in cat.into(a)
                        if (base.restrict(z, f), phi.dst.restrict(x, f)) in counts[cat.dom[f]]
                    }
                    hit = top.covers_arrows(a, arrows)
                if not hit:
                    out.append(Violation("NotCovered", {"object": cat.objects[a], "base": z, "target": x}))
        for key, n in counts[a].items():
            if not smallness.admits(n):
                out.append(Violation("NotSmall", {"object": cat.objects[a], "over": list(key), "size": n}))
    return out


def validate_mvs(mvs: Mvs, mode: str = "pointwise", top: Topology | None = None,
                 smallness: SmallnessClass = UNBOUNDED) -> None:
    bad = mvs_violations(mvs.phi, mvs.base, mvs.carrier, mode, top, smallness)
    if bad:
        raise PresheafError(bad, "mvs")


def enumerate_mvs(
    phi: PresheafMorphism,
    mode: str = "pointwise",
    top: Topology | None = None,
    base: Presheaf | None = None,
    smallness: SmallnessClass = UNBOUNDED,
    label: str = "1",
) -> list[Mvs]:
    """All mvss of φ over ``base`` (terminal by default), smallest first."""
    require_small(phi, smallness)
    base = base if base is not None else terminal(phi.src.cat)
    ZB = product(base, phi.src)
    return [
        Mvs(phi, base, P, label)
        for P in all_subpresheaves(ZB)
        if not mvs_violations(phi, base, P, mode, top, smallness)
    ]


def minimal_mvs(mvss: Sequence[Mvs]) -> list[Mvs]:
    """Members with no proper sub-mvs in the list."""
    return [m for m in mvss if not any(o.carrier <= m.carrier and o.carrier != m.carrier for o in mvss)]


def search_minimal_mvs(
    phi: PresheafMorphism,
    mode: str = "pointwise",
    top: Topology | None = None,
    base: Presheaf | None = None,
    smallness: SmallnessClass = UNBOUNDED,
    label: str = "1",
) -> list[Mvs]:
    """The minimal mvss of φ over ``base`` without enumerating every subpresheaf.

    Grows a subpresheaf from empty, branching only on the first requirement
    (z, x) that is not yet covered; each branch adds one element (z·f, b)
    with φ(b) = x·f (f an identity in pointwise mode) and closes under
    restriction. Every minimal mvs M is reached by always adding elements
    of M, so the minimal sets found are exactly the minimal mvss.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    require_small(phi, smallness)
    cat = phi.src.cat
    top = top or trivial_topology(cat)
    base = base if base is not None else terminal(cat)
    B, A = phi.src, phi.dst
    reqs = [(a, z, x) for a in range(cat.n_objects) for z in base.fibers[a] for x in A.fibers[a]]

    def close(cur: frozenset, a: int, zb: tuple) -> frozenset:
        z, b = zb
        return cur | {(cat.dom[g], (base.restrict(z, g), B.restrict(b, g))) for g in cat.into(a)}

    def small(cur: frozenset) -> bool:
        if smallness.bound is None:
            return True
        counts: dict = {}
        for a, (z, b) in cur:
            key = (a, z, phi.comp[a][b])
            counts[key] = counts.get(key, 0) + 1
        return all(smallness.admits(n) for n in counts.values())

    def hit(cur: frozenset, a: int, z: Elem, x: Elem) -> bool:
        return any((a, (z, b)) in cur for b in phi.fiber(a, x))

    def uncovered(cur: frozenset) -> tuple | None:
        for a, z, x in reqs:
            if mode == "pointwise":
                ok = hit(cur, a, z, x)
            else:
                ok = top.covers_arrows(
                    a, (f for f in cat.into(a) if hit(cur, cat.dom[f], base.restrict(z, f), A.restrict(x, f)))
                )
            if not ok:
                return a, z, x
        return None

    found: set[frozenset] = set()
    seen: set[frozenset] = set()

    def grow(cur: frozenset) -> None:
        if cur in seen:
            return
        seen.add(cur)
        if not small(cur):
            return
        req = uncovered(cur)
        if req is None:
            found.add(cur)
            return
        a, z, x = req
        arrows = (cat.identity[a],) if mode == "pointwise" else cat.into(a)
        for f in arrows:
            d = cat.dom[f]
            zf, xf = base.restrict(z, f), A.restrict(x, f)
            for b in phi.fiber(d, xf):
                if (d, (zf, b)) not in cur:
                    grow(close(cur, d, (zf, b)))

    grow(frozenset())
    ZB = product(base, B)
    minimal = [s for s in found if not any(t < s for t in found)]
    out = []
    for s in minimal:
        member = [set() for _ in range(cat.n_objects)]
        for a, zb in s:
            member[a].add(zb)
        out.append(Mvs(phi, base, Subpresheaf(ZB, member), label))
    return sorted(out, key=lambda m: _position_key(m))


def _position_key(m: Mvs) -> tuple:
    of = m.carrier.of
    return (m.carrier.size(), sorted((a, of.position(a, e)) for a, mem in enumerate(m.carrier.member) for e in mem))


def pullback_mvs(Q: Mvs, k: PresheafMorphism, label: str = "pullback") -> Mvs:
    """k*Q over U for k: U → Z: {(u, b) : (k(u), b) ∈ Q}."""
    U = k.src
    UB = product(U, Q.phi.src)
    member = [
        {(u, b) for (u, b) in UB.fibers[a] if (k.comp[a][u], b) in Q.carrier.member[a]}
        for a in range(U.cat.n_objects)
    ]
    return Mvs(Q.phi, U, Subpresheaf(UB, member), label)


def default_test_objects(cat) -> list[tuple[str, Presheaf]]:
    """The terminal presheaf, every representable, and binary products of representables."""
    tests = [("1", terminal(cat))]
    ys = [(f"y({cat.objects[c]})", representable(cat, c)) for c in range(cat.n_objects)]
    tests += ys
    for i in range(len(ys)):
        for j in range(i, len(ys)):
            tests.append((f"{ys[i][0]}x{ys[j][0]}", product(ys[i][1], ys[j][1])))
    return tests


def representable_family(
    phi: PresheafMorphism,
    which: str = "minimal",
    mode: str = "pointwise",
    top: Topology | None = None,
    smallness: SmallnessClass = UNBOUNDED,
) -> list[Mvs]:
    """mvss over each representable: all of them, or only the minimal ones."""
    cat = phi.src.cat
    out: list[Mvs] = []
    for c in range(cat.n_objects):
        args = (phi, mode, top, representable(cat, c), smallness, f"y({cat.objects[c]})")
        out += search_minimal_mvs(*args) if which == "minimal" else enumerate_mvs(*args)
    return out


@dataclass
class GenericResult:
    ok: bool
    witness: dict[str, Any] | None
    test_objects: list[str]
    checked: int

    def __bool__(self) -> bool:
        return self.ok


def _refines(member: Mvs, w: Elem, Q: Mvs, z: Elem, d: int) -> bool:
    """k*P ≤ l*Q at the element (z, w): every (w·f, b) ∈ P has (z·f, b) ∈ Q."""
    cat = Q.base.cat
    W, Z, B = member.base, Q.base, Q.phi.src
    for f in cat.into(d):
        e = cat.dom[f]
        wf, zf = W.restrict(w, f), Z.restrict(z, f)
        for b in B.fibers[e]:
            if (wf, b) in member.carrier.member[e] and (zf, b) not in Q.carrier.member[e]:
                return False
    return True


def check_generic(
    family: Sequence[Mvs],
    phi: PresheafMorphism,
    test_objects: Sequence[tuple[str, Presheaf]] | None = None,
    mode: str = "pointwise",
    top: Topology | None = None,
    smallness: SmallnessClass = UNBOUNDED,
) -> GenericResult:
    """Whether every mvs over every test object is refined by a family member.

    Refinement is monotone in Q, and every mvs contains a minimal one, so it
    suffices to test the minimal mvss over each test object.
    """
    cat = phi.src.cat
    top = top or trivial_topology(cat)
    tests = list(test_objects) if test_objects is not None else default_test_objects(cat)
    checked = 0
    for label, Z in tests:
        for Q in search_minimal_mvs(phi, mode, top, Z, smallness, label):
            checked += 1
            good = [
                {
                    z
                    for z in Z.fibers[d]
                    if any(_refines(P, w, Q, z, d) for P in family for w in P.base.fibers[d])
                }
                for d in range(cat.n_objects)
            ]
            for d in range(cat.n_objects):
                for z in Z.fibers[d]:
                    if mode == "pointwise":
                        ok = z in good[d]
                    else:
                        ok = top.covers_arrows(d, {f for f in cat.into(d) if Z.restrict(z, f) in good[cat.dom[f]]})
                    if not ok:
                        return GenericResult(
                            False,
                            {"test_object": label, "mvs": Q.describe(), "object": cat.objects[d], "element": z},
                            [t[0] for t in tests],
                            checked,
                        )
    return GenericResult(True, None, [t[0] for t in tests], checked)
