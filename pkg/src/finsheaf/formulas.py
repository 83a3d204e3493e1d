"""First-order formulas of set theory and their parenthesized prefix syntax.

Terms are variables or literals ``#n`` naming carrier elements of a
universe. Surface syntax::

    true  false
    (eq s t)  (= s t)  (mem s t)
    (and φ ψ ...)  (or φ ψ ...)  (implies φ ψ)  (iff φ ψ)  (not φ)
    (forall x φ)  (exists x φ)        unbounded, over the rank-k carrier
    (forall x 2 φ)  (exists x 2 φ)    over names of height ≤ 2
    (forall-in x t φ)  (exists-in x t φ)

``all``/``ex``/``allIn``/``exIn`` are accepted as aliases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Union

from .errors import OpenFormula, ParseError


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    index: int


Term = Union[Var, Lit]


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Mem:
    left: Term
    right: Term


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class All:
    var: str
    body: "Formula"
    max_height: int | None = None


@dataclass(frozen=True)
class Ex:
    var: str
    body: "Formula"
    max_height: int | None = None


@dataclass(frozen=True)
class AllIn:
    var: str
    bound: Term
    body: "Formula"


@dataclass(frozen=True)
class ExIn:
    var: str
    bound: Term
    body: "Formula"


Formula = Union[Top, Bot, Eq, Mem, And, Or, Implies, Not, All, Ex, AllIn, ExIn]

TRUE = Top()
FALSE = Bot()


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def conj(*parts: Formula) -> Formula:
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(*parts: Formula) -> Formula:
    if not parts:
        return FALSE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


# ---------------------------------------------------------------------------
# traversal


def _map_term(t: Term, var: str | None, value: Term | None, lit: Callable[[int], int] | None) -> Term:
    if isinstance(t, Var):
        return value if var is not None and t.name == var else t
    return Lit(lit(t.index)) if lit is not None else t


def _map(phi: Formula, var: str | None, value: Term | None, lit: Callable[[int], int] | None) -> Formula:
    if isinstance(phi, (Top, Bot)):
        return phi
    if isinstance(phi, (Eq, Mem)):
        return type(phi)(_map_term(phi.left, var, value, lit), _map_term(phi.right, var, value, lit))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(_map(phi.left, var, value, lit), _map(phi.right, var, value, lit))
    if isinstance(phi, Not):
        return Not(_map(phi.body, var, value, lit))
    if isinstance(phi, (All, Ex)):
        inner_var = None if phi.var == var else var
        return type(phi)(phi.var, _map(phi.body, inner_var, value, lit), phi.max_height)
    if isinstance(phi, (AllIn, ExIn)):
        bound = _map_term(phi.bound, var, value, lit)
        inner_var = None if phi.var == var else var
        return type(phi)(phi.var, bound, _map(phi.body, inner_var, value, lit))
    raise TypeError(f"not a formula: {phi!r}")


def substitute(phi: Formula, var: str, value: Term) -> Formula:
    """Replace free occurrences of ``var``; values are literals so capture cannot occur."""
    return _map(phi, var, value, None)


def map_literals(phi: Formula, fn: Callable[[int], int]) -> Formula:
    return _map(phi, None, None, fn)


def free_vars(phi: Formula) -> frozenset[str]:
    def term(t: Term) -> set[str]:
        return {t.name} if isinstance(t, Var) else set()

    if isinstance(phi, (Top, Bot)):
        return frozenset()
    if isinstance(phi, (Eq, Mem)):
        return frozenset(term(phi.left) | term(phi.right))
    if isinstance(phi, (And, Or, Implies)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (All, Ex)):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, (AllIn, ExIn)):
        return frozenset(term(phi.bound)) | (free_vars(phi.body) - {phi.var})
    raise TypeError(f"not a formula: {phi!r}")


def literals(phi: Formula) -> Iterator[int]:
    found: list[int] = []
    map_literals(phi, lambda i: found.append(i) or i)
    return iter(found)


def require_closed(phi: Formula) -> None:
    fv = free_vars(phi)
    if fv:
        raise OpenFormula(f"free variables: {sorted(fv)}")


def size(phi: Formula) -> int:
    if isinstance(phi, (Top, Bot, Eq, Mem)):
        return 1
    if isinstance(phi, (And, Or, Implies)):
        return 1 + size(phi.left) + size(phi.right)
    return 1 + size(phi.body)


# ---------------------------------------------------------------------------
# printing


def term_str(t: Term) -> str:
    return t.name if isinstance(t, Var) else f"#{t.index}"


def to_sexpr(phi: Formula) -> str:
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bot):
        return "false"
    if isinstance(phi, Eq):
        return f"(eq {term_str(phi.left)} {term_str(phi.right)})"
    if isinstance(phi, Mem):
        return f"(mem {term_str(phi.left)} {term_str(phi.right)})"
    if isinstance(phi, And):
        return f"(and {to_sexpr(phi.left)} {to_sexpr(phi.right)})"
    if isinstance(phi, Or):
        return f"(or {to_sexpr(phi.left)} {to_sexpr(phi.right)})"
    if isinstance(phi, Implies):
        return f"(implies {to_sexpr(phi.left)} {to_sexpr(phi.right)})"
    if isinstance(phi, Not):
        return f"(not {to_sexpr(phi.body)})"
    if isinstance(phi, (All, Ex)):
        head = "forall" if isinstance(phi, All) else "exists"
        bound = "" if phi.max_height is None else f" {phi.max_height}"
        return f"({head} {phi.var}{bound} {to_sexpr(phi.body)})"
    if isinstance(phi, (AllIn, ExIn)):
        head = "forall-in" if isinstance(phi, AllIn) else "exists-in"
        return f"({head} {phi.var} {term_str(phi.bound)} {to_sexpr(phi.body)})"
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_SYMBOL = re.compile(r"[A-Za-z_][A-Za-z0-9_'\-]*$")


@dataclass
class _Tok:
    text: str
    line: int
    col: int


@dataclass
class _Node:
    items: list
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        assert m is not None
        s = m.group(0)
        if not s.isspace() and not s.startswith(";"):
            toks.append(_Tok(s, line, col))
        for ch in s:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    return toks


def _read(toks: list[_Tok], i: int) -> tuple[object, int]:
    if i >= len(toks):
        last = toks[-1] if toks else _Tok("", 1, 1)
        raise ParseError("unexpected end of input", last.line, last.col + len(last.text))
    t = toks[i]
    if t.text == ")":
        raise ParseError("unexpected ')'", t.line, t.col)
    if t.text != "(":
        return t, i + 1
    items = []
    j = i + 1
    while True:
        if j >= len(toks):
            raise ParseError("unclosed '('", t.line, t.col)
        if toks[j].text == ")":
            return _Node(items, t.line, t.col), j + 1
        item, j = _read(toks, j)
        items.append(item)


_ALIASES = {
    "all": "forall",
    "ex": "exists",
    "allIn": "forall-in",
    "exIn": "exists-in",
    "=": "eq",
}


def _where(x: object) -> tuple[int, int]:
    return (x.line, x.col)  # type: ignore[attr-defined]


def _term(x: object) -> Term:
    if isinstance(x, _Node):
        raise ParseError("expected a term", *_where(x))
    text = x.text  # type: ignore[attr-defined]
    if text.startswith("#"):
        if not text[1:].isdigit():
            raise ParseError(f"bad literal {text!r}", *_where(x))
        return Lit(int(text[1:]))
    if not _SYMBOL.match(text):
        raise ParseError(f"bad variable {text!r}", *_where(x))
    return Var(text)


def _var(x: object) -> str:
    t = _term(x)
    if not isinstance(t, Var):
        raise ParseError("expected a variable", *_where(x))
    return t.name


def _formula(x: object) -> Formula:
    if not isinstance(x, _Node):
        text = x.text  # type: ignore[attr-defined]
        if text == "true":
            return TRUE
        if text == "false":
            return FALSE
        raise ParseError(f"expected a formula, got {text!r}", *_where(x))
    if not x.items or isinstance(x.items[0], _Node):
        raise ParseError("expected an operator", x.line, x.col)
    head = x.items[0].text
    head = _ALIASES.get(head, head)
    args = x.items[1:]

    def arity(n: int) -> None:
        if len(args) != n:
            raise ParseError(f"'{head}' takes {n} arguments, got {len(args)}", x.line, x.col)

    if head in ("eq", "mem"):
        arity(2)
        cls = Eq if head == "eq" else Mem
        return cls(_term(args[0]), _term(args[1]))
    if head in ("and", "or"):
        if not args:
            raise ParseError(f"'{head}' needs arguments", x.line, x.col)
        parts = [_formula(a) for a in args]
        return conj(*parts) if head == "and" else disj(*parts)
    if head in ("implies", "iff"):
        arity(2)
        a, b = _formula(args[0]), _formula(args[1])
        return Implies(a, b) if head == "implies" else iff(a, b)
    if head == "not":
        arity(1)
        return Not(_formula(args[0]))
    if head in ("forall", "exists"):
        cls = All if head == "forall" else Ex
        if len(args) == 3:
            tok = args[1]
            if isinstance(tok, _Node) or not tok.text.isdigit():
                raise ParseError("expected a height bound", *_where(tok))
            return cls(_var(args[0]), _formula(args[2]), int(tok.text))
        arity(2)
        return cls(_var(args[0]), _formula(args[1]))
    if head in ("forall-in", "exists-in"):
        arity(3)
        cls = AllIn if head == "forall-in" else ExIn
        return cls(_var(args[0]), _term(args[1]), _formula(args[2]))
    raise ParseError(f"unknown operator {head!r}", *_where(x.items[0]))


def parse_formula(text: str) -> Formula:
    """Parse exactly one formula."""
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty input", 1, 1)
    node, j = _read(toks, 0)
    if j != len(toks):
        raise ParseError("trailing input after formula", toks[j].line, toks[j].col)
    return _formula(node)


def parse_formulas(text: str) -> list[Formula]:
    """Parse a file of whitespace-separated formulas."""
    toks = _tokenize(text)
    out = []
    j = 0
    while j < len(toks):
        node, j = _read(toks, j)
        out.append(_formula(node))
    return out
