"""Polynomial functors and W-types in presheaves and in sheaves.

W-types are built by height-bounded iteration. A round applies the
polynomial functor to the previous carrier; the result is flagged as
stabilized when the last round adds nothing, in which case it is the
genuine initial algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from .coverage import Sieve, Topology, largest_subsieve, pullback_sieve
from .errors import NotStabilized, PresheafError
from .presheaf import (
    Elem,
    Presheaf,
    PresheafMorphism,
    SmallnessClass,
    Subpresheaf,
    UNBOUNDED,
    empty,
    homs,
    m_fiber,
    m_fiber_presheaf,
    morphism_from_function,
    natural_sections,
    presheaf_from_action,
    reindex_section,
    require_small,
)
from .sheaf import require_sheaf
from .search import UnionFind


def poly_apply(F: PresheafMorphism, Z: Presheaf, smallness: SmallnessClass = UNBOUNDED) -> Presheaf:
    """P_F(Z)(a) = {(x, t) : x ∈ X(a), t: Y^M_x → Z natural}; (x, t)·f = (x·f, f*t)."""
    require_small(F, smallness)
    cat, X = F.src.cat, F.dst
    fibers = [[(x, t) for x in X.fibers[a] for t in natural_sections(F, a, x, Z)] for a in range(cat.n_objects)]
    return presheaf_from_action(cat, fibers, lambda el, h: reindex_section(F, el[0], el[1], h))


# ---------------------------------------------------------------------------
# presheaf W-types


class PshTree:
    """sup_x t: root label (a, x), one subtree per (f, y) in ``m_fiber(F, a, x)``."""

    __slots__ = ("root", "label", "children", "_hash", "height")

    def __init__(self, root: int, label: Elem, children: Iterable["PshTree"]):
        self.root = root
        self.label = label
        self.children = tuple(children)
        self._hash = hash((root, label, self.children))
        self.height = 1 + max((c.height for c in self.children), default=-1)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, PshTree)
            and self._hash == other._hash
            and self.root == other.root
            and self.label == other.label
            and self.children == other.children
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"sup[{self.root},{self.label!r}]({', '.join(map(repr, self.children))})"


def restrict_tree(F: PresheafMorphism, v: PshTree, h: int) -> PshTree:
    """v·h = sup_{x·h} h*t."""
    xh, t = reindex_section(F, v.label, v.children, h)
    return PshTree(F.src.cat.dom[h], xh, t)


def is_natural(F: PresheafMorphism, v: PshTree) -> bool:
    """Children satisfy t(f, y)·g = t(fg, y·g) and are rooted at dom f."""
    cat, Y = F.src.cat, F.src
    pairs = m_fiber(F, v.root, v.label)
    if len(pairs) != len(v.children):
        return False
    index = {p: i for i, p in enumerate(pairs)}
    for (f, y), child in zip(pairs, v.children):
        if child.root != cat.dom[f]:
            return False
        for g in cat.into(cat.dom[f]):
            if restrict_tree(F, child, g) != v.children[index[(cat.compose(f, g), Y.restrict(y, g))]]:
                return False
    return True


def is_hereditarily_natural(F: PresheafMorphism, v: PshTree) -> bool:
    return is_natural(F, v) and all(is_hereditarily_natural(F, c) for c in v.children)


def _extend(prev: tuple, new: Iterable) -> tuple:
    seen = set(prev)
    return prev + tuple(x for x in new if x not in seen and not seen.add(x))


@dataclass
class PresheafWType:
    morphism: PresheafMorphism
    depth: int
    presheaf: Presheaf
    stabilized: bool
    sizes_by_round: list[tuple[int, ...]]


def presheaf_wtype(F: PresheafMorphism, depth: int, smallness: SmallnessClass = UNBOUNDED) -> PresheafWType:
    """All hereditarily natural trees of height ≤ depth (leaves have height 0)."""
    require_small(F, smallness)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    cat, X = F.src.cat, F.dst
    W = empty(cat)
    sizes = [W.sizes()]
    prev = W
    for _ in range(depth + 1):
        prev = W
        fibers = [
            _extend(W.fibers[a], (PshTree(a, x, t) for x in X.fibers[a] for t in natural_sections(F, a, x, W)))
            for a in range(cat.n_objects)
        ]
        W = presheaf_from_action(cat, fibers, lambda v, h: restrict_tree(F, v, h))
        sizes.append(W.sizes())
    return PresheafWType(F, depth, W, prev.fibers == W.fibers, sizes)


def presheaf_sup(F: PresheafMorphism, W: Presheaf) -> PresheafMorphism:
    """The algebra map P_F(W) → W, (x, t) ↦ sup_x t (validated for naturality)."""
    return morphism_from_function(poly_apply(F, W), W, lambda a, el: PshTree(a, el[0], el[1]))


# ---------------------------------------------------------------------------
# sheaf W-types


class ShfTree:
    """sup_{(a, x, S)} t with S a covering sieve and t(f, y) a nonempty set of trees."""

    __slots__ = ("root", "label", "sieve", "children", "_hash", "height")

    def __init__(self, root: int, label: Elem, sieve: frozenset[int], children: Iterable[frozenset["ShfTree"]]):
        self.root = root
        self.label = label
        self.sieve = frozenset(sieve)
        self.children = tuple(frozenset(c) for c in children)
        self._hash = hash((root, label, self.sieve, self.children))
        self.height = 1 + max((m.height for c in self.children for m in c), default=-1)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, ShfTree)
            and self._hash == other._hash
            and self.root == other.root
            and self.label == other.label
            and self.sieve == other.sieve
            and self.children == other.children
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        kids = ", ".join("{" + ", ".join(map(repr, c)) + "}" for c in self.children)
        return f"sup[{self.root},{self.label!r},{sorted(self.sieve)}]({kids})"


class ShfTrees:
    """Tree operations for a fixed small F: Y → X and topology, with a memoized ~."""

    def __init__(self, F: PresheafMorphism, top: Topology):
        self.F = F
        self.top = top
        self.cat = top.cat
        self._bisim: dict[tuple[ShfTree, ShfTree], bool] = {}

    def pairs(self, v: ShfTree) -> list[tuple[int, Elem]]:
        return m_fiber(self.F, v.root, v.label, v.sieve)

    def child(self, v: ShfTree, f: int, y: Elem) -> frozenset[ShfTree]:
        return v.children[self.pairs(v).index((f, y))]

    def restrict(self, v: ShfTree, h: int) -> ShfTree:
        """v·h: label x·h, sieve h*S, subtrees v(h∘g, y)."""
        cat = self.cat
        pb = pullback_sieve(cat, Sieve(v.root, v.sieve), h)
        xh = self.F.dst.restrict(v.label, h)
        table = dict(zip(self.pairs(v), v.children))
        kids = [table[(cat.compose(h, g), y)] for g, y in m_fiber(self.F, cat.dom[h], xh, pb.arrows)]
        return ShfTree(cat.dom[h], xh, pb.arrows, kids)

    def bisimilar(self, v: ShfTree, w: ShfTree) -> bool:
        """Same root and label, and a covering R ⊆ S ∩ S' on which all subtrees are pairwise ~."""
        key = (v, w)
        if key in self._bisim:
            return self._bisim[key]
        ok = False
        if v.root == w.root and v.label == w.label:
            tv = dict(zip(self.pairs(v), v.children))
            tw = dict(zip(self.pairs(w), w.children))
            agree = set()
            for f in v.sieve & w.sieve:
                fibre = [p for p in tv if p[0] == f]
                if all(self.sets_bisimilar(tv[p], tw[p]) for p in fibre):
                    agree.add(f)
            ok = self.top.covers(largest_subsieve(self.cat, v.root, agree))
        self._bisim[key] = ok
        return ok

    def sets_bisimilar(self, M: frozenset[ShfTree], N: frozenset[ShfTree]) -> bool:
        return all(self.bisimilar(m, n) for m in M for n in N)

    def is_natural(self, v: ShfTree) -> bool:
        """Subtrees are rooted at dom f, nonempty, and v(f, y)·g ~ v(fg, y·g)."""
        cat, Y = self.cat, self.F.src
        pairs = self.pairs(v)
        if len(pairs) != len(v.children):
            return False
        table = dict(zip(pairs, v.children))
        for (f, y), kids in table.items():
            if not kids or any(k.root != cat.dom[f] for k in kids):
                return False
            for g in cat.into(cat.dom[f]):
                moved = frozenset(self.restrict(k, g) for k in kids)
                if not self.sets_bisimilar(moved, table[(cat.compose(f, g), Y.restrict(y, g))]):
                    return False
        return True

    def is_hereditarily_natural(self, v: ShfTree) -> bool:
        return self.is_natural(v) and all(self.is_hereditarily_natural(k) for c in v.children for k in c)


@dataclass
class SheafWType:
    morphism: PresheafMorphism
    topology: Topology
    depth: int
    presheaf: Presheaf  # the quotient, elements are class representatives
    trees: list[list[ShfTree]]  # every built tree per object, in creation order
    rep: dict[ShfTree, ShfTree]
    stabilized: bool
    sizes_by_round: list[tuple[int, ...]]
    ops: ShfTrees = field(repr=False)

    def classes(self, a: int) -> dict[ShfTree, list[ShfTree]]:
        out: dict[ShfTree, list[ShfTree]] = {}
        for t in self.trees[a]:
            out.setdefault(self.rep[t], []).append(t)
        return out


def sheaf_wtype(
    F: PresheafMorphism, top: Topology, depth: int, smallness: SmallnessClass = UNBOUNDED
) -> SheafWType:
    """Hereditarily natural trees of height ≤ depth modulo ~.

    Each round builds, for every (a, x) and covering sieve S, the trees whose
    subtrees are singleton sets of class representatives chosen naturally,
    i.e. natural maps Y^S_x → W̄. Every ~-class of hereditarily natural trees
    has such a member, and representatives (earliest built) never change
    between rounds.
    """
    require_small(F, smallness)
    require_sheaf(F.src, top, "domain")
    require_sheaf(F.dst, top, "codomain")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    cat, X = top.cat, F.dst
    ops = ShfTrees(F, top)
    trees: list[list[ShfTree]] = [[] for _ in range(cat.n_objects)]
    seen: set[ShfTree] = set()
    rep: dict[ShfTree, ShfTree] = {}
    Wbar = empty(cat)
    sizes = [Wbar.sizes()]
    prev = Wbar
    for _ in range(depth + 1):
        prev = Wbar
        for a in range(cat.n_objects):
            for x in X.fibers[a]:
                for S in top.covering(a):
                    pairs = m_fiber(F, a, x, S.arrows)
                    M = m_fiber_presheaf(F, a, x, S.arrows)
                    for s in homs(M, Wbar):
                        kids = [frozenset({s.comp[cat.dom[f]][(f, y)]}) for f, y in pairs]
                        t = ShfTree(a, x, S.arrows, kids)
                        if t not in seen:
                            seen.add(t)
                            trees[a].append(t)
        fibers = []
        for a in range(cat.n_objects):
            ts = trees[a]
            uf = UnionFind(len(ts))
            for i in range(len(ts)):
                for j in range(i + 1, len(ts)):
                    if uf.find(i) != uf.find(j) and ops.bisimilar(ts[i], ts[j]):
                        uf.union(i, j)
            for i, t in enumerate(ts):
                rep[t] = ts[uf.find(i)]
            fibers.append(tuple(t for i, t in enumerate(ts) if uf.find(i) == i))
        Wbar = presheaf_from_action(cat, fibers, lambda v, h: rep[ops.restrict(v, h)])
        sizes.append(Wbar.sizes())
    return SheafWType(F, top, depth, Wbar, trees, rep, prev.fibers == Wbar.fibers, sizes, ops)


def sheaf_sup(W: SheafWType) -> PresheafMorphism:
    """P_F(W̄) → W̄, (x, t) ↦ [sup_{(a, x, M_a)} {t(f, y)}]."""
    F, cat, ops = W.morphism, W.topology.cat, W.ops

    def sup(a: int, el: tuple) -> ShfTree:
        x, t = el
        full = frozenset(cat.into(a))
        tree = ShfTree(a, x, full, [frozenset({c}) for c in t])
        for cand in W.presheaf.fibers[a]:
            if ops.bisimilar(tree, cand):
                return cand
        raise NotStabilized("sup lands outside the truncated carrier")

    return morphism_from_function(poly_apply(F, W.presheaf), W.presheaf, sup)


# ---------------------------------------------------------------------------
# initial algebra verification


def check_initial_algebra(result: PresheafWType | SheafWType) -> dict[str, Any]:
    """Check that sup is a well-defined monic algebra map and that W has no proper subalgebra."""
    if not result.stabilized:
        raise NotStabilized(f"carrier still growing at depth {result.depth}")
    F = result.morphism
    W = result.presheaf
    cat = W.cat
    sheafy = isinstance(result, SheafWType)
    try:
        sup = sheaf_sup(result) if sheafy else presheaf_sup(F, W)
    except PresheafError as exc:
        return {"well_defined": False, "detail": str(exc), "ok": False}
    members = [set() for _ in range(cat.n_objects)]
    iterations = 0
    while True:
        iterations += 1
        grown = [set(m) for m in members]
        for a in range(cat.n_objects):
            for el in sup.src.fibers[a]:
                x, t = el
                pairs = m_fiber(F, a, x)
                if all(c in members[cat.dom[f]] for (f, _), c in zip(pairs, t)):
                    grown[a].add(sup.comp[a][el])
        if sheafy:
            top = result.topology
            changed = True
            while changed:
                changed = False
                for a in range(cat.n_objects):
                    for w in W.fibers[a]:
                        if w in grown[a]:
                            continue
                        hit = {f for f in cat.into(a) if W.restrict(w, f) in grown[cat.dom[f]]}
                        if top.covers_arrows(a, hit):
                            grown[a].add(w)
                            changed = True
        if grown == members:
            break
        members = grown
    least = Subpresheaf(W, members)
    return {
        "well_defined": True,
        "monic": sup.is_mono(),
        "surjective": sup.is_componentwise_surjective(),
        "least_subalgebra_is_everything": least == Subpresheaf.full(W),
        "iterations": iterations,
        "ok": sup.is_mono() and least == Subpresheaf.full(W),
    }
