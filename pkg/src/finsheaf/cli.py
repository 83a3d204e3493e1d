"""Command-line front end.

Every subcommand prints one JSON report on standard output and a one-line
summary per verdict on standard error. Exit codes: 0 when every check
passes, 1 when a check fails (the report carries witnesses), 2 on usage or
parse errors. Reports are byte-stable for identical inputs and flags; wall
clock timings are added only with ``--timing``.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

from . import io
from .coverage import topology_violations
from .errors import (
    CategoryError,
    FinsheafError,
    NotASheaf,
    NotAPartialOrder,
    NotSmall,
    NotStabilized,
    ParseError,
    ValidationError,
)
from .forcing import Forcing, check_rst_axioms
from .formulas import literals, parse_formulas, to_sexpr
from .mvs import MODES, check_generic, default_test_objects, enumerate_mvs, minimal_mvs, representable_family
from .names import Universe
from .presheaf import UNBOUNDED, SmallnessClass
from .sheaf import is_separated, is_sheaf, sheafify
from .wtypes import check_initial_algebra, is_hereditarily_natural, presheaf_wtype, sheaf_wtype

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TOPOLOGY_AXIOMS = (
    ("maximality", "MaximalityViolation"),
    ("stability", "StabilityViolation"),
    ("local_character", "LocalCharacterViolation"),
)


class Report:
    def __init__(self, command: str, inputs: dict[str, str], config: dict[str, Any]):
        self.data: dict[str, Any] = {
            "command": command,
            "inputs": inputs,
            "config": config,
            "checks": [],
        }
        self.lines: list[str] = []

    def check(self, name: str, ok: bool | None, witness: Any = None, **extra: Any) -> bool:
        entry: dict[str, Any] = {"name": name, "status": "skipped" if ok is None else ("pass" if ok else "fail")}
        if ok is False:
            entry["witness"] = witness
        entry.update(extra)
        self.data["checks"].append(entry)
        return bool(ok) or ok is None

    @property
    def ok(self) -> bool:
        return all(c["status"] != "fail" for c in self.data["checks"])

    def finish(self) -> dict[str, Any]:
        self.data["ok"] = self.ok
        return self.data


# ---------------------------------------------------------------------------
# inputs


def _inputs(args: argparse.Namespace, names: Sequence[str]) -> dict[str, str]:
    """sha256 of every input file, keyed by flag name."""
    out = {}
    for n in names:
        p = getattr(args, n, None)
        if p and Path(p).is_file():
            out[n] = io.digest(Path(p).read_bytes())
    return out


def _smallness(args: argparse.Namespace) -> SmallnessClass:
    bound = getattr(args, "small_bound", None)
    return UNBOUNDED if bound is None else SmallnessClass(bound)


def _violations(vs) -> list[dict[str, Any]]:
    return [v.to_dict() for v in vs]


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args: argparse.Namespace) -> Report:
    rep = Report("validate", _inputs(args, ["site", "presheaf", "morphism"]), {})
    raw = io.read_json(args.site)
    try:
        parts = io.site_parts_from_json(raw)
    except (CategoryError, NotAPartialOrder) as exc:
        rep.check("category", False, _violations(exc.violations))
        return rep
    rep.check("category", True)
    cat = parts.category
    rep.data["config"]["topology_kind"] = parts.kind
    if parts.kind in ("trivial", "explicit"):
        vs = topology_violations(cat, parts.cov)
    else:
        try:
            io.topology_from_parts(parts)
            vs = []
        except ValidationError as exc:
            vs = exc.violations
    for name, kind in TOPOLOGY_AXIOMS:
        bad = [v for v in vs if v.kind == kind]
        rep.check(f"topology.{name}", not bad, _violations(bad))
    other = [v for v in vs if v.kind not in dict(TOPOLOGY_AXIOMS).values()]
    if other:
        rep.check("topology.shape", False, _violations(other))
    if not rep.ok:
        return rep
    top = io.topology_from_parts(parts)
    rep.data["topology"] = top.describe()["cov"]
    if args.presheaf:
        try:
            P = io.presheaf_from_json(cat, io.read_json(args.presheaf))
        except ValidationError as exc:
            rep.check("presheaf", False, _violations(exc.violations))
            return rep
        rep.check("presheaf", True, sizes=list(P.sizes()))
        sep = is_separated(P, top)
        shf = is_sheaf(P, top)
        rep.data["presheaf"] = {"separated": sep.ok, "sheaf": shf.ok, "sheaf_witness": shf.witness}
    if args.morphism:
        try:
            F = io.morphism_from_json(cat, io.read_json(args.morphism))
        except ValidationError as exc:
            rep.check("morphism", False, _violations(exc.violations))
            return rep
        rep.check("morphism", True, max_fiber=F.max_fiber())
    return rep


def cmd_sheafify(args: argparse.Namespace) -> Report:
    top = io.load_site(args.site)
    P = io.presheaf_from_json(top.cat, io.read_json(args.presheaf))
    rep = Report("sheafify", _inputs(args, ["site", "presheaf"]), {"use_basis": args.basis})
    res = sheafify(P, top, args.basis)
    Pp = res.first.presheaf
    sep = is_separated(Pp, top)
    rep.check("plus_is_separated", sep.ok, sep.witness)
    shf = is_sheaf(res.sheaf, top)
    rep.check("plus_plus_is_sheaf", shf.ok, shf.witness)
    S, labels = io.relabel(res.sheaf)
    cat = top.cat
    rep.data["input_is_sheaf"] = is_sheaf(P, top).ok
    rep.data["sizes"] = {
        "input": list(P.sizes()),
        "plus": list(Pp.sizes()),
        "sheaf": list(S.sizes()),
    }
    rep.data["sheaf"] = io.presheaf_to_json(S)
    rep.data["unit"] = {
        cat.objects[a]: {str(x): labels[a][res.unit.comp[a][x]] for x in P.fibers[a]} for a in range(cat.n_objects)
    }
    rep.lines.append(f"sheafified sizes {list(S.sizes())}")
    return rep


def cmd_wtype(args: argparse.Namespace) -> Report:
    top = io.load_site(args.site)
    F = io.morphism_from_json(top.cat, io.read_json(args.morphism))
    small = _smallness(args)
    rep = Report(
        "wtype",
        _inputs(args, ["site", "morphism"]),
        {"depth": args.depth, "sheaf": args.sheaf, "smallness": small.describe()},
    )
    cat = top.cat
    if args.sheaf:
        W = sheaf_wtype(F, top, args.depth, small)
        trees = [t for ts in W.trees for t in ts]
        bad = next((t for t in trees if not W.ops.is_hereditarily_natural(t)), None)
    else:
        W = presheaf_wtype(F, args.depth, small)
        trees = [t for fb in W.presheaf.fibers for t in fb]
        bad = next((t for t in trees if not is_hereditarily_natural(F, t)), None)
    rep.check("hereditarily_natural", bad is None, repr(bad))
    rep.data["stabilized"] = W.stabilized
    rep.data["sizes_by_height"] = [
        {cat.objects[a]: n for a, n in enumerate(sizes)} for sizes in W.sizes_by_round[1:]
    ]
    rep.data["carrier_sizes"] = {cat.objects[a]: n for a, n in enumerate(W.presheaf.sizes())}
    if W.stabilized:
        ia = check_initial_algebra(W)
        rep.check("initial_algebra", ia["ok"], ia, detail=ia)
    else:
        rep.check("initial_algebra", None, reason=f"not stabilized at depth {args.depth}")
    rep.lines.append(
        f"{'sheaf' if args.sheaf else 'presheaf'} W-type sizes {list(W.presheaf.sizes())}, "
        f"stabilized: {str(W.stabilized).lower()}"
    )
    return rep


def _universe(args: argparse.Namespace) -> tuple[Any, Universe]:
    top = io.load_site(args.site)
    return top, Universe(top, args.rank, args.limit)


def cmd_universe(args: argparse.Namespace) -> Report:
    top, U = _universe(args)
    rep = Report("universe", _inputs(args, ["site"]), {"rank": args.rank, "limit": args.limit})
    rep.data["universe"] = io.universe_to_json(U)
    rep.lines.append(f"rank {args.rank}: classes {U.carrier_sizes()}")
    return rep


def cmd_force(args: argparse.Namespace) -> Report:
    top, U = _universe(args)
    text = Path(args.formula).read_text(encoding="utf-8")
    formulas = parse_formulas(text)
    if not formulas:
        raise ParseError(f"{args.formula}: no formulas")
    rep = Report(
        "force",
        _inputs(args, ["site", "formula"]),
        {"rank": args.rank, "at": args.at, "expect": args.expect},
    )
    cat = top.cat
    F = Forcing(U)
    verdicts = []
    for phi in formulas:
        lits = list(literals(phi))
        if args.at is not None:
            objs = [cat.obj(args.at)]
        elif lits:
            objs = sorted({U.root(i) for i in lits})
        else:
            objs = list(range(cat.n_objects))
        for c in objs:
            value = F.force(c, phi)
            verdicts.append({"formula": to_sexpr(phi), "object": cat.objects[c], "forced": value})
            rep.lines.append(f"forced at {cat.objects[c]}: {str(value).lower()}")
            if args.expect is not None:
                want = args.expect == "true"
                rep.check(
                    f"expect {args.expect} at {cat.objects[c]}",
                    value == want,
                    {"formula": to_sexpr(phi), "object": cat.objects[c], "forced": value},
                )
    rep.data["verdicts"] = verdicts
    return rep


def cmd_axioms(args: argparse.Namespace) -> Report:
    top, U = _universe(args)
    rep = Report("axioms", _inputs(args, ["site"]), {"rank": args.rank, "params_per_object": args.params})
    res = check_rst_axioms(U, args.params)
    for name, entry in res["axioms"].items():
        if entry["status"] == "not checkable":
            rep.check(name, None, reason=entry["reason"], note="not checkable")
        else:
            rep.check(name, entry["status"] == "pass", entry["failures"][:5], instances=entry["instances"])
    rep.data["axioms"] = {name: entry["status"] for name, entry in res["axioms"].items()}
    rep.lines.append(f"RST at rank {args.rank}: {'pass' if res['ok'] else 'fail'}")
    return rep


def cmd_mvs(args: argparse.Namespace) -> Report:
    top = io.load_site(args.site)
    phi = io.morphism_from_json(top.cat, io.read_json(args.morphism))
    small = _smallness(args)
    tests = default_test_objects(top.cat)
    rep = Report(
        "mvs",
        _inputs(args, ["site", "morphism", "family"]),
        {
            "mode": args.mode,
            "family": args.family if args.family in ("all", "minimal") else "explicit",
            "smallness": small.describe(),
            "test_objects": [t[0] for t in tests],
        },
    )
    if args.family in ("all", "minimal"):
        family = representable_family(phi, args.family, args.mode, top, small)
    else:
        family = io.family_from_json(phi, io.read_json(args.family))
    global_mvs = enumerate_mvs(phi, args.mode, top, None, small)
    rep.data["global_mvs"] = len(global_mvs)
    rep.data["global_minimal_mvs"] = len(minimal_mvs(global_mvs))
    rep.data["family"] = [io.mvs_to_json(m) for m in family]
    res = check_generic(family, phi, tests, args.mode, top, small)
    rep.check("generic", res.ok, res.witness, mvss_checked=res.checked)
    rep.lines.append(f"family of {len(family)} mvss generic: {str(res.ok).lower()}")
    return rep


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="finsheaf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        sp.add_argument("--site", required=True, help="site JSON file")
        sp.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")
        return sp

    sp = add("validate", cmd_validate, "check category and topology axioms, optionally a presheaf/morphism")
    sp.add_argument("--presheaf")
    sp.add_argument("--morphism")

    sp = add("sheafify", cmd_sheafify, "plus-plus construction with certificate")
    sp.add_argument("--presheaf", required=True)
    sp.add_argument("--basis", action="store_true", help="compare families on basic covers only")

    sp = add("wtype", cmd_wtype, "W-type of a morphism, truncated at a depth")
    sp.add_argument("--morphism", required=True)
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--sheaf", action="store_true", help="sheaf W-type (quotient by ~)")
    sp.add_argument("--small-bound", type=int, default=None, help="largest admissible fiber size")

    for name, fn, help in (
        ("universe", cmd_universe, "dump the names universe"),
        ("force", cmd_force, "evaluate formulas by forcing"),
        ("axioms", cmd_axioms, "check RST axiom instances"),
    ):
        sp = add(name, fn, help)
        sp.add_argument("--rank", type=int, default=3)
        sp.add_argument("--limit", type=int, default=4096, help="largest number of names per object and height")
        if name == "force":
            sp.add_argument("--formula", required=True, help="file of formulas in prefix syntax")
            sp.add_argument("--at", default=None, help="object to force at (default: root of the literals)")
            sp.add_argument("--expect", choices=("true", "false"), default=None)
        if name == "axioms":
            sp.add_argument("--params", type=int, default=3, help="parameters per object in schema instances")

    sp = add("mvs", cmd_mvs, "genericity of a family of multi-valued sections")
    sp.add_argument("--morphism", required=True)
    sp.add_argument("--mode", choices=MODES, default="pointwise")
    sp.add_argument("--family", default="minimal", help="all, minimal, or a family JSON file")
    sp.add_argument("--small-bound", type=int, default=None, help="largest admissible fiber size")
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        rep = args.fn(args)
    except ParseError as exc:
        detail = {"message": exc.message, "line": exc.line, "column": exc.column}
        return _error(stdout, stderr, args.command, "ParseError", detail, EXIT_USAGE)
    except (ValidationError, NotASheaf, NotSmall, NotStabilized) as exc:
        detail = _violations(exc.violations) if isinstance(exc, ValidationError) else str(exc)
        return _error(stdout, stderr, args.command, type(exc).__name__, detail, EXIT_FAIL)
    except (FinsheafError, OSError, ValueError, KeyError) as exc:
        return _error(stdout, stderr, args.command, type(exc).__name__, str(exc), EXIT_USAGE)
    if args.timing:
        rep.data["timing_seconds"] = round(time.perf_counter() - start, 3)
    data = rep.finish()
    stdout.write(io.dumps(data))
    for line in rep.lines:
        stderr.write(line + "\n")
    stderr.write(f"{args.command}: {'pass' if rep.ok else 'fail'}\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def _error(stdout, stderr, command: str, kind: str, detail: Any, code: int) -> int:
    stdout.write(io.dumps({"command": command, "ok": False, "error": {"kind": kind, "detail": detail}}))
    stderr.write(f"{command}: {kind}: {detail}\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
