"""The universe of forcing names over a finite site, truncated at a rank.

A name at c is sup_c t with t(f) a set of names at dom f for each arrow f
into c. Names must be composable and natural (v ∈ t(f) implies
v·g ∈ t(fg)); restriction is sup_c t · f = sup_d t(f∘−). The carrier is
the set of all natural names of height ≤ rank, independent of the topology;
the topology enters through the bisimulation ~ and the membership relation.

Carrier indices are stable: names are listed by (root, height, creation
order), so literal ``#n`` denotes the same name under every topology on the
same category.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator

from .category import FiniteCategory
from .coverage import Topology, max_sieve
from .errors import CarrierTooLarge, RootMismatch, UnknownLiteral
from .search import UnionFind, canonical_order, closed_subsets


@dataclass(frozen=True)
class Name:
    """sup_root t, with ``entries`` the pairs (f, member index) such that member ∈ t(f)."""

    root: int
    entries: frozenset[tuple[int, int]]

    def members(self, f: int) -> list[int]:
        return sorted(i for g, i in self.entries if g == f)


class Universe:
    def __init__(self, top: Topology, rank: int, limit: int = 4096):
        if rank < 0:
            raise ValueError("rank must be non-negative")
        self.limit = limit
        self.top = top
        self.cat: FiniteCategory = top.cat
        self.rank = rank
        self._build_carrier()
        self._build_equivalence()
        self._build_membership()

    # -- carrier ------------------------------------------------------------

    def _build_carrier(self) -> None:
        cat = self.cat
        names: list[Name] = []
        height: list[int] = []
        index: dict[Name, int] = {}
        restr: dict[tuple[int, int], int] = {}
        level: list[list[int]] = [[] for _ in range(cat.n_objects)]

        def restrict(i: int, f: int) -> Name:
            v = names[i]
            return Name(
                cat.dom[f],
                frozenset((g, m) for g in cat.into(cat.dom[f]) for m in v.members(cat.compose(f, g))),
            )

        for h in range(1, self.rank + 1):
            fresh: list[list[int]] = [[] for _ in range(cat.n_objects)]
            for c in range(cat.n_objects):
                items = [(f, v) for f in cat.into(c) for v in level[cat.dom[f]]]
                succ = lambda it: [(cat.compose(it[0], g), restr[it[1], g]) for g in cat.into(cat.dom[it[0]])]
                for entries in canonical_order(self._bounded(closed_subsets(items, succ), c), items):
                    nm = Name(c, entries)
                    if nm not in index:
                        index[nm] = len(names)
                        names.append(nm)
                        height.append(h)
                        fresh[c].append(index[nm])
            for c in range(cat.n_objects):
                for i in fresh[c]:
                    for f in cat.into(c):
                        restr[i, f] = index[restrict(i, f)]
                level[c] = level[c] + fresh[c]

        # renumber by (root, height, creation order)
        order = sorted(range(len(names)), key=lambda i: (names[i].root, height[i], i))
        new_of = {old: new for new, old in enumerate(order)}
        self.names: list[Name] = [
            Name(names[i].root, frozenset((f, new_of[m]) for f, m in names[i].entries)) for i in order
        ]
        self.height: list[int] = [height[i] for i in order]
        self.index: dict[Name, int] = {nm: i for i, nm in enumerate(self.names)}
        self._restr: dict[tuple[int, int], int] = {(new_of[i], f): new_of[j] for (i, f), j in restr.items()}
        self.by_object: list[list[int]] = [[] for _ in range(cat.n_objects)]
        for i, nm in enumerate(self.names):
            self.by_object[nm.root].append(i)

    def _bounded(self, gen: Iterator, c: int) -> Iterator:
        for n, x in enumerate(gen):
            if n >= self.limit:
                raise CarrierTooLarge(
                    f"more than {self.limit} names at {self.cat.objects[c]} below rank {self.rank}"
                )
            yield x

    def restrict(self, i: int, f: int) -> int:
        self.check_literal(i)
        if self.cat.cod[f] != self.names[i].root:
            raise RootMismatch(f"#{i} is not rooted at the codomain of {self.cat.arrows[f]}")
        return self._restr[i, f]

    def check_literal(self, i: int) -> None:
        if not (isinstance(i, int) and 0 <= i < len(self.names)):
            raise UnknownLiteral(i)

    def root(self, i: int) -> int:
        self.check_literal(i)
        return self.names[i].root

    # -- bisimulation -------------------------------------------------------

    def _half(self, v: int, w: int) -> bool:
        """For every f and m ∈ t_v(f), {g : ∃ m' ∈ t_w(fg), m·g ~ m'} covers dom f."""
        cat, eq = self.cat, self._eq
        wt = self.names[w].entries
        for f, m in self.names[v].entries:
            d = cat.dom[f]
            hit = {
                g
                for g in cat.into(d)
                if any((self._restr[m, g], m2) in eq for (h, m2) in wt if h == cat.compose(f, g))
            }
            if not self.top.covers_arrows(d, hit):
                return False
        return True

    def _build_equivalence(self) -> None:
        # subsidiary pairs always have smaller maximal height, possibly at another root
        self._eq: set[tuple[int, int]] = set()
        pairs = sorted(
            ((i, j) for idx in self.by_object for i in idx for j in idx),
            key=lambda p: (max(self.height[p[0]], self.height[p[1]]), p),
        )
        for i, j in pairs:
            if self._half(i, j) and self._half(j, i):
                self._eq.add((i, j))
        uf = UnionFind(len(self.names))
        for i, j in self._eq:
            uf.union(i, j)
        self.rep: list[int] = [uf.find(i) for i in range(len(self.names))]
        self.reps: list[list[int]] = [[i for i in idx if self.rep[i] == i] for idx in self.by_object]

    def equiv(self, i: int, j: int) -> bool:
        self.check_literal(i)
        self.check_literal(j)
        if self.names[i].root != self.names[j].root:
            raise RootMismatch(f"#{i} and #{j} have different roots")
        return (i, j) in self._eq

    # -- membership ---------------------------------------------------------

    def _build_membership(self) -> None:
        cat = self.cat
        self._mem: set[tuple[int, int]] = set()
        for c, idx in enumerate(self.by_object):
            for j in idx:
                t = self.names[j].entries
                for i in idx:
                    hit = {f for f in cat.into(c) if any((self._restr[i, f], m) in self._eq for g, m in t if g == f)}
                    if self.top.covers_arrows(c, hit):
                        self._mem.add((i, j))
        if all(self.top.covering(a) == (max_sieve(cat, a),) for a in range(cat.n_objects)):
            # presheaf clause: x ∈ sup_c t iff x ∈ t(id_c)
            for c, idx in enumerate(self.by_object):
                ident = cat.identity[c]
                for j in idx:
                    direct = {m for g, m in self.names[j].entries if g == ident}
                    for i in idx:
                        assert ((i, j) in self._mem) == (i in direct), "membership clauses disagree"

    def mem(self, i: int, j: int) -> bool:
        """[#i] ∈ [#j] at their common root."""
        self.check_literal(i)
        self.check_literal(j)
        if self.names[i].root != self.names[j].root:
            raise RootMismatch(f"#{i} and #{j} have different roots")
        return (i, j) in self._mem

    # -- listing ------------------------------------------------------------

    def quantifier_range(self, d: int, max_height: int | None = None) -> list[int]:
        """Class representatives at d (least height in class), optionally height-bounded."""
        return [i for i in self.reps[d] if max_height is None or self.height[i] <= max_height]

    def carrier_sizes(self) -> dict[str, int]:
        return {self.cat.objects[c]: len(r) for c, r in enumerate(self.reps)}

    def name_sizes(self) -> dict[str, int]:
        return {self.cat.objects[c]: len(r) for c, r in enumerate(self.by_object)}

    def iter_names(self) -> Iterator[tuple[int, Name]]:
        return enumerate(self.names)

    def describe(self) -> dict[str, Any]:
        cat = self.cat
        listing = []
        for i, nm in enumerate(self.names):
            entries: dict[str, list[int]] = {}
            for f, m in sorted(nm.entries):
                entries.setdefault(cat.arrows[f], []).append(m)
            listing.append(
                {
                    "index": i,
                    "root": cat.objects[nm.root],
                    "height": self.height[i],
                    "entries": entries,
                    "class": self.rep[i],
                    "members": [m for m in self.by_object[nm.root] if (m, i) in self._mem and self.rep[m] == m],
                }
            )
        return {
            "rank": self.rank,
            "names": listing,
            "classes_per_object": self.carrier_sizes(),
            "names_per_object": self.name_sizes(),
        }

    def name_of(self, root: int, entries: dict[int, list[int]]) -> int:
        """Index of the carrier name with the given entries ``{arrow: [member indices]}``."""
        nm = Name(root, frozenset((f, m) for f, ms in entries.items() for m in ms))
        try:
            return self.index[nm]
        except KeyError:
            raise UnknownLiteral(f"no natural name with entries {entries} at rank {self.rank}") from None


def build_universe(top: Topology, rank: int, limit: int = 4096) -> Universe:
    return Universe(top, rank, limit)


def names_equiv(U: Universe, v: int, w: int) -> bool:
    return U.equiv(v, w)
