"""JSON file formats for sites, presheaves, morphisms, mvs families and universe dumps.

Site::

    {"category": {"objects": [...], "arrows": [{"id", "dom", "cod"}, ...],
                  "identity": {obj: arrow}, "compose": [[g, f, g∘f], ...]}
     "topology": {"kind": "trivial"}
               | {"kind": "dense-poset"}
               | {"kind": "explicit", "cov":  {obj: [[arrow, ...], ...]}}
               | {"kind": "basis",    "bcov": {obj: [[arrow, ...], ...]}}}

``"category"`` may instead be ``{"poset": {"elements": [...], "leq": [[q, p], ...]}}``;
the ``leq`` pairs are closed reflexively and transitively. A missing
topology block means the trivial topology.

Presheaf::

    {"fibers": {obj: [element, ...]}, "restrict": [[arrow, x, x·arrow], ...]}

Identity restrictions may be omitted. Elements are strings. Presheaves the
library builds carry structured elements; :func:`relabel` renames them to
``"<obj>.<position>"`` before they are written out.

Morphism::

    {"source": presheaf, "target": presheaf, "components": {obj: {x: y}}}
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from .category import FiniteCategory, category_violations, order_closure, poset_as_category
from .coverage import (
    Presentation,
    Sieve,
    Topology,
    dense_topology,
    generate_topology,
    max_sieve,
    sieves_from_names,
    topology_violations,
    trivial_topology,
)
from .errors import (
    CategoryError,
    ParseError,
    PresheafError,
    TopologyError,
    ValidationError,
    Violation,
)
from .mvs import Mvs
from .names import Universe
from .presheaf import Elem, Presheaf, PresheafMorphism, Subpresheaf, product

TOPOLOGY_KINDS = ("trivial", "dense-poset", "explicit", "basis")


def read_json(path: str | Path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from None


def dumps(data: Any) -> str:
    """Canonical JSON text: fixed indentation, insertion order, trailing newline."""
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def digest(*texts: str | bytes) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode("utf-8") if isinstance(t, str) else t)
        h.update(b"\0")
    return h.hexdigest()


def _need(raw: Any, key: str, where: str) -> Any:
    if not isinstance(raw, Mapping) or key not in raw:
        raise ParseError(f"{where}: missing key {key!r}")
    return raw[key]


# ---------------------------------------------------------------------------
# sites


def category_from_json(raw: Mapping[str, Any]) -> FiniteCategory:
    if not isinstance(raw, Mapping):
        raise ParseError("category block must be an object")
    if "poset" in raw:
        pos = raw["poset"]
        elements = [str(e) for e in _need(pos, "elements", "poset")]
        leq = [(str(q), str(p)) for q, p in pos.get("leq", [])]
        return poset_as_category(elements, order_closure(elements, leq))
    violations, cat = category_violations(raw)
    if violations:
        raise CategoryError(violations)
    assert cat is not None
    return cat


def category_to_json(cat: FiniteCategory) -> dict[str, Any]:
    return cat.describe()


@dataclass
class SiteParts:
    """A parsed site file before the topology is validated."""

    category: FiniteCategory
    kind: str
    cov: list[set[Sieve]] | None
    presentation: Presentation | None


def site_parts_from_json(raw: Mapping[str, Any]) -> SiteParts:
    cat = category_from_json(_need(raw, "category", "site"))
    top = raw.get("topology", {"kind": "trivial"})
    kind = top.get("kind") if isinstance(top, Mapping) else None
    if kind not in TOPOLOGY_KINDS:
        raise ParseError(f"topology kind must be one of {TOPOLOGY_KINDS}, got {kind!r}")
    if kind == "trivial":
        return SiteParts(cat, kind, [{max_sieve(cat, a)} for a in range(cat.n_objects)], None)
    if kind == "dense-poset":
        return SiteParts(cat, kind, None, None)
    field = "cov" if kind == "explicit" else "bcov"
    fam = sieves_from_names(cat, _need(top, field, f"{kind} topology"))
    if kind == "explicit":
        return SiteParts(cat, kind, fam, None)
    return SiteParts(cat, kind, None, Presentation(tuple(tuple(sorted(f, key=lambda s: sorted(s.arrows))) for f in fam)))


def topology_from_parts(parts: SiteParts) -> Topology:
    cat = parts.category
    if parts.kind == "trivial":
        return trivial_topology(cat)
    if parts.kind == "dense-poset":
        return dense_topology(cat)
    if parts.kind == "basis":
        assert parts.presentation is not None
        return generate_topology(cat, parts.presentation)
    assert parts.cov is not None
    violations = topology_violations(cat, parts.cov)
    if violations:
        raise TopologyError(violations)
    return Topology(cat, tuple(frozenset(c) for c in parts.cov), None, "explicit")


def site_from_json(raw: Mapping[str, Any]) -> Topology:
    return topology_from_parts(site_parts_from_json(raw))


def site_to_json(top: Topology) -> dict[str, Any]:
    return {"category": category_to_json(top.cat), "topology": top.describe()}


def load_site(path: str | Path) -> Topology:
    return site_from_json(read_json(path))


# ---------------------------------------------------------------------------
# presheaves and morphisms


def presheaf_from_json(cat: FiniteCategory, raw: Mapping[str, Any]) -> Presheaf:
    fib_raw = _need(raw, "fibers", "presheaf")
    if not isinstance(fib_raw, Mapping):
        raise ParseError("presheaf: 'fibers' must map objects to lists")
    fibers: list[list[str]] = [[] for _ in range(cat.n_objects)]
    for o, elems in fib_raw.items():
        fibers[cat.obj(str(o))] = [str(x) for x in elems]
    restriction: dict[tuple[int, Elem], Elem] = {}
    for rec in raw.get("restrict", []):
        if not (isinstance(rec, Sequence) and len(rec) == 3):
            raise ParseError(f"presheaf: restriction entries are [arrow, x, y], got {rec!r}")
        f, x, y = rec
        key = (cat.arrow(str(f)), str(x))
        if key in restriction and restriction[key] != str(y):
            raise PresheafError([Violation("ConflictingRestriction", {"arrow": str(f), "element": str(x)})])
        restriction[key] = str(y)
    return Presheaf(cat, fibers, restriction)


def presheaf_to_json(X: Presheaf) -> dict[str, Any]:
    """Plain-JSON form; elements are written with ``str``."""
    cat = X.cat
    return {
        "fibers": {cat.objects[a]: [str(x) for x in X.fibers[a]] for a in range(cat.n_objects)},
        "restrict": [
            [cat.arrows[f], str(x), str(X.restrict(x, f))]
            for f in range(cat.n_arrows)
            if not cat.is_identity(f)
            for x in X.fibers[cat.cod[f]]
        ],
    }


def element_labels(X: Presheaf) -> list[dict[Elem, str]]:
    """``"<obj>.<position>"`` for every element."""
    cat = X.cat
    return [{x: f"{cat.objects[a]}.{i}" for i, x in enumerate(fb)} for a, fb in enumerate(X.fibers)]


def relabel(X: Presheaf) -> tuple[Presheaf, list[dict[Elem, str]]]:
    """An isomorphic presheaf with string elements, and the renaming used."""
    labels = element_labels(X)
    cat = X.cat
    fibers = [[labels[a][x] for x in fb] for a, fb in enumerate(X.fibers)]
    restriction = {
        (f, labels[cat.cod[f]][x]): labels[cat.dom[f]][X.restrict(x, f)]
        for f in range(cat.n_arrows)
        for x in X.fibers[cat.cod[f]]
    }
    return Presheaf(cat, fibers, restriction), labels


def morphism_from_json(cat: FiniteCategory, raw: Mapping[str, Any]) -> PresheafMorphism:
    src = presheaf_from_json(cat, _need(raw, "source", "morphism"))
    dst = presheaf_from_json(cat, _need(raw, "target", "morphism"))
    comp_raw = _need(raw, "components", "morphism")
    comp: list[dict[Elem, Elem]] = [{} for _ in range(cat.n_objects)]
    for o, mapping in comp_raw.items():
        comp[cat.obj(str(o))] = {str(x): str(y) for x, y in mapping.items()}
    return PresheafMorphism(src, dst, comp)


def morphism_to_json(F: PresheafMorphism) -> dict[str, Any]:
    cat = F.src.cat
    return {
        "source": presheaf_to_json(F.src),
        "target": presheaf_to_json(F.dst),
        "components": {
            cat.objects[a]: {str(x): str(F.comp[a][x]) for x in F.src.fibers[a]} for a in range(cat.n_objects)
        },
    }


def relabel_morphism(F: PresheafMorphism, src_labels: list[dict], dst_labels: list[dict],
                     src: Presheaf, dst: Presheaf) -> PresheafMorphism:
    comp = [{src_labels[a][x]: dst_labels[a][F.comp[a][x]] for x in F.src.fibers[a]} for a in range(len(F.comp))]
    return PresheafMorphism(src, dst, comp)


# ---------------------------------------------------------------------------
# mvs families


def family_from_json(phi: PresheafMorphism, raw: Mapping[str, Any]) -> list[Mvs]:
    """``{"members": [{"label", "base": presheaf, "carrier": {obj: [[z, b], ...]}}]}``."""
    cat = phi.src.cat
    out = []
    for n, m in enumerate(_need(raw, "members", "family")):
        base = presheaf_from_json(cat, _need(m, "base", "family member"))
        ZB = product(base, phi.src)
        member: list[set] = [set() for _ in range(cat.n_objects)]
        for o, pairs in _need(m, "carrier", "family member").items():
            member[cat.obj(str(o))] = {(str(z), str(b)) for z, b in pairs}
        out.append(Mvs(phi, base, Subpresheaf(ZB, member), str(m.get("label", f"member{n}"))))
    return out


def mvs_to_json(m: Mvs) -> dict[str, Any]:
    cat = m.base.cat
    carrier: dict[str, list] = {o: [] for o in cat.objects}
    for o, z, b in m.members():
        carrier[o].append([str(z), str(b)])
    return {"label": m.label, "base": presheaf_to_json(m.base), "carrier": carrier}


# ---------------------------------------------------------------------------
# universes


def universe_to_json(U: Universe) -> dict[str, Any]:
    return U.describe()


def universe_from_json(top: Topology, raw: Mapping[str, Any], limit: int = 4096) -> Universe:
    """Rebuild the universe a dump was taken from and check that the dump matches it."""
    rank = _need(raw, "rank", "universe")
    if not isinstance(rank, int):
        raise ParseError("universe: 'rank' must be an integer")
    U = Universe(top, rank, limit)
    if universe_to_json(U) != raw:
        raise ValidationError([Violation("DumpMismatch", {"rank": rank})], "universe dump")
    return U
