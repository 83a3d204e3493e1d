"""Kripke–Joyal forcing over a names universe, and the RST axiom suite.

Quantifiers range over the truncated carrier (one representative per ~-class
at each object), so every verdict about an unbounded quantifier is relative
to the rank of the universe.
"""

from __future__ import annotations

from typing import Any, Iterable

from .errors import RootMismatch
from .formulas import (
    FALSE,
    All,
    AllIn,
    And,
    Bot,
    Eq,
    Ex,
    ExIn,
    Formula,
    Implies,
    Lit,
    Mem,
    Not,
    Or,
    Top,
    Var,
    conj,
    disj,
    iff,
    literals,
    map_literals,
    require_closed,
    substitute,
    to_sexpr,
)
from .names import Universe


class Forcing:
    """Memoized evaluator of c ⊩ φ for closed formulas with literals rooted at c."""

    def __init__(self, U: Universe):
        self.U = U
        self.cat = U.cat
        self.top = U.top
        self._memo: dict[tuple[int, Formula], bool] = {}

    def restrict(self, phi: Formula, f: int) -> Formula:
        return map_literals(phi, lambda i: self.U.restrict(i, f))

    def force(self, c: int, phi: Formula) -> bool:
        require_closed(phi)
        for i in literals(phi):
            if self.U.root(i) != c:
                raise RootMismatch(f"literal #{i} is rooted at {self.cat.objects[self.U.root(i)]}, not {self.cat.objects[c]}")
        return self._force(c, phi)

    def _covers(self, c: int, arrows: Iterable[int]) -> bool:
        return self.top.covers_arrows(c, arrows)

    def _force(self, c: int, phi: Formula) -> bool:
        key = (c, phi)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        value = self._eval(c, phi)
        self._memo[key] = value
        return value

    def _eval(self, c: int, phi: Formula) -> bool:
        cat, U = self.cat, self.U
        if isinstance(phi, Top):
            return True
        if isinstance(phi, Bot):
            return self.top.degenerate(c)
        if isinstance(phi, Eq):
            return U.equiv(phi.left.index, phi.right.index)
        if isinstance(phi, Mem):
            return U.mem(phi.left.index, phi.right.index)
        if isinstance(phi, And):
            return self._force(c, phi.left) and self._force(c, phi.right)
        if isinstance(phi, Or):
            return self._covers(
                c,
                (
                    f
                    for f in cat.into(c)
                    if self._force(cat.dom[f], self.restrict(phi.left, f))
                    or self._force(cat.dom[f], self.restrict(phi.right, f))
                ),
            )
        if isinstance(phi, Implies):
            return all(
                not self._force(cat.dom[f], self.restrict(phi.left, f))
                or self._force(cat.dom[f], self.restrict(phi.right, f))
                for f in cat.into(c)
            )
        if isinstance(phi, Not):
            return self._force(c, Implies(phi.body, FALSE))
        if isinstance(phi, All):
            return all(
                self._force(d, substitute(body, phi.var, Lit(r)))
                for f, d, body in self._moves(c, phi.body)
                for r in U.quantifier_range(d, phi.max_height)
            )
        if isinstance(phi, Ex):
            return self._covers(
                c,
                (
                    f
                    for f, d, body in self._moves(c, phi.body)
                    if any(self._force(d, substitute(body, phi.var, Lit(r))) for r in U.quantifier_range(d, phi.max_height))
                ),
            )
        if isinstance(phi, AllIn):
            # ∀x (x ε t → φ), with the implication's arrows absorbed by the outer loop
            return all(
                self._force(d, substitute(body, phi.var, Lit(r)))
                for f, d, body in self._moves(c, phi.body)
                for r in U.quantifier_range(d)
                if U.mem(r, U.restrict(phi.bound.index, f))
            )
        if isinstance(phi, ExIn):
            return self._covers(
                c,
                (
                    f
                    for f, d, body in self._moves(c, phi.body)
                    if any(
                        U.mem(r, U.restrict(phi.bound.index, f)) and self._force(d, substitute(body, phi.var, Lit(r)))
                        for r in U.quantifier_range(d)
                    )
                ),
            )
        raise TypeError(f"not a formula: {phi!r}")

    def _moves(self, c: int, body: Formula):
        for f in self.cat.into(c):
            yield f, self.cat.dom[f], self.restrict(body, f)


def force(U: Universe, c: int, phi: Formula) -> bool:
    return Forcing(U).force(c, phi)


# ---------------------------------------------------------------------------
# RST axioms

x, y, z, a_, b_ = Var("x"), Var("y"), Var("z"), Var("a"), Var("b")


def _separation_pool(params: list[int]) -> list[Formula]:
    """Bounded formulas φ(x) with literal parameters."""
    pool: list[Formula] = []
    for p in params:
        P = Lit(p)
        pool += [
            Eq(x, P),
            Mem(x, P),
            Mem(P, x),
            Not(Mem(x, P)),
            ExIn("z", x, Eq(z, P)),
            AllIn("z", x, Mem(z, P)),
            Or(Eq(x, P), Not(Eq(x, P))),
        ]
    return pool


def _induction_pool(params: list[int]) -> list[Formula]:
    pool: list[Formula] = [Not(Mem(x, x)), AllIn("z", x, Not(Mem(z, z)))]
    for p in params:
        pool += [Not(Mem(Lit(p), x)), Not(Eq(x, Lit(p)))]
    return pool


def _collection_pool(params: list[int]) -> list[Formula]:
    """Relations φ(x, y)."""
    pool: list[Formula] = [Eq(y, x), Mem(y, x), Mem(x, y), AllIn("z", y, Mem(z, x))]
    for p in params:
        pool.append(Or(Eq(y, x), Eq(y, Lit(p))))
    return pool


def _close(phi: Formula, var: str, value: int) -> Formula:
    return substitute(phi, var, Lit(value))


def check_rst_axioms(U: Universe, params_per_object: int = 3) -> dict[str, Any]:
    """Evaluate finite instance suites of the RST axioms at every object.

    Unbounded quantifiers range over the rank-k carrier; witnesses that must
    contain given names (pairs, collections) are sought for names of height
    ≤ k − 1 so that the witness itself fits below the rank.
    """
    F = Forcing(U)
    cat, k = U.cat, U.rank
    report: dict[str, dict[str, Any]] = {}

    def record(axiom: str, c: int, phi: Formula, detail: dict | None = None) -> None:
        entry = report.setdefault(axiom, {"status": "pass", "instances": 0, "failures": []})
        entry["instances"] += 1
        if not F.force(c, phi):
            entry["status"] = "fail"
            entry["failures"].append({"object": cat.objects[c], "instance": to_sexpr(phi), **(detail or {})})

    for c in range(cat.n_objects):
        reps = U.quantifier_range(c)
        lower = U.quantifier_range(c, k - 1)
        params = reps[:params_per_object]

        for i in reps:
            for j in reps:
                A, B = Lit(i), Lit(j)
                record("extensionality", c, Implies(All("x", iff(Mem(x, A), Mem(x, B))), Eq(A, B)))

        record("empty_set", c, Ex("y", All("x", Not(Mem(x, y)))))

        for i in lower:
            for j in lower:
                A, B = Lit(i), Lit(j)
                record("pairing", c, Ex("y", All("x", iff(Mem(x, y), Or(Eq(x, A), Eq(x, B))))))

        for i in reps:
            A = Lit(i)
            record("union", c, Ex("y", All("x", iff(Mem(x, y), ExIn("z", A, Mem(x, z))))))

        for i in reps:
            A = Lit(i)
            for phi in _separation_pool(params):
                record(
                    "bounded_separation",
                    c,
                    Ex("y", All("x", iff(Mem(x, y), And(Mem(x, A), phi)))),
                )

        for phi in _induction_pool(params):
            hyp = All("a", Implies(AllIn("x", a_, phi), substitute(phi, "x", a_)))
            record("set_induction", c, Implies(hyp, All("x", phi)))

        for i in reps:
            A = Lit(i)
            for phi in _collection_pool(params):
                total = AllIn("x", A, Ex("y", phi, k - 1))
                coll = Ex(
                    "b",
                    And(
                        AllIn("x", A, ExIn("y", b_, phi)),
                        AllIn("y", b_, ExIn("x", A, phi)),
                    ),
                )
                record("strong_collection", c, Implies(total, coll))

    # well-foundedness of forced membership on representatives at each object
    cyc = report.setdefault("set_induction", {"status": "pass", "instances": 0, "failures": []})
    for c in range(cat.n_objects):
        cyc["instances"] += 1
        cycle = _membership_cycle(U, c)
        if cycle is not None:
            cyc["status"] = "fail"
            cyc["failures"].append({"object": cat.objects[c], "membership_cycle": cycle})

    report["infinity"] = {"status": "not checkable", "reason": f"no infinite set exists below rank {k}"}
    checked = [v for name, v in report.items() if name != "infinity"]
    return {
        "rank": k,
        "ok": all(v["status"] == "pass" for v in checked),
        "axioms": dict(sorted(report.items())),
    }


def _membership_cycle(U: Universe, c: int) -> list[int] | None:
    reps = U.quantifier_range(c)
    succ = {i: [j for j in reps if U.mem(i, j)] for i in reps}
    state: dict[int, int] = {}
    stack: list[int] = []

    def dfs(i: int) -> list[int] | None:
        state[i] = 1
        stack.append(i)
        for j in succ[i]:
            if state.get(j) == 1:
                return stack[stack.index(j):] + [j]
            if j not in state:
                found = dfs(j)
                if found:
                    return found
        stack.pop()
        state[i] = 2
        return None

    for i in reps:
        if i not in state:
            found = dfs(i)
            if found:
                return found
    return None


__all__ = ["Forcing", "force", "check_rst_axioms", "conj", "disj"]
