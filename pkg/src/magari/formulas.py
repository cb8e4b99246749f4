"""Formula terms over the diagonalizable-algebra signature, with parsing and printing.

Concrete syntax (ASCII, with Unicode aliases in parentheses):

    formula := iff
    iff     := imp { "<->" imp }           left associative      (also accepts "∼", "↔")
    imp     := or [ "->" imp ]             right associative     ("⊃")
    or      := and { "|" and }                                   ("∨")
    and     := unary { "&" unary }                               ("∧")
    unary   := ("!" | "D" | "#" | "@") unary | atom              ("¬", "Δ", "□", "∇")
    atom    := "0" | "1" | ident | "(" formula ")"
    ident   := lowercase letter { lowercase letter | digit | "_" }

"D" is the primitive diagonal operator, "#" the cumulative-conjunction box
derived from it, "@" the first-coordinate projection derived from the box.
Uppercase D is reserved, so identifiers never collide with it.

ElementLit nodes carry algebra constants produced by constant folding; the
parser never emits them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from .algebra import Element, ONE, ZERO, box, delta, format_element, implies as elt_implies, join, meet, nabla, negate


# === AST ===


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int  # 0 or 1


@dataclass(frozen=True)
class ElementLit:
    element: Element


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Or:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Delta:
    arg: "Formula"


@dataclass(frozen=True)
class Box:
    arg: "Formula"


@dataclass(frozen=True)
class Nabla:
    arg: "Formula"


Formula = Union[Var, Const, ElementLit, Not, And, Or, Implies, Iff, Delta, Box, Nabla]

_BINARY = (And, Or, Implies, Iff)
_UNARY = (Not, Delta, Box, Nabla)


@dataclass(frozen=True)
class NamedFormula:
    """A signature entry: a formula under a name, with arity = its free variables."""

    name: str
    formula: Formula


# === Parsing ===


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_ALIASES = {
    "¬": "!",
    "Δ": "D",
    "□": "#",
    "∇": "@",
    "∧": "&",
    "∨": "|",
    "⊃": "->",
    "∼": "<->",
    "↔": "<->",
}

_SINGLE = set("!&|()01D#@")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _ALIASES:
            tokens.append((_ALIASES[c], i))
            i += 1
            continue
        if c in _SINGLE:
            tokens.append((c, i))
            i += 1
            continue
        if c == "-":
            if text[i : i + 2] == "->":
                tokens.append(("->", i))
                i += 2
                continue
            raise ParseError("expected '->'", i)
        if c == "<":
            if text[i : i + 3] == "<->":
                tokens.append(("<->", i))
                i += 3
                continue
            raise ParseError("expected '<->'", i)
        if c.isascii() and c.islower() and c.isalpha():
            j = i + 1
            while j < n and (text[j].isascii() and (text[j].isalnum() or text[j] == "_") and not text[j].isupper()):
                j += 1
            tokens.append(("ident:" + text[i:j], i))
            i = j
            continue
        if c.isascii() and c.isupper():
            raise ParseError(f"reserved or unknown token {c!r}, variables are lowercase", i)
        raise ParseError(f"unexpected character {c!r}", i)
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, int]:
        if self.pos >= len(self.tokens):
            raise ParseError("unexpected end of input", len(self.text))
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def here(self) -> int:
        return self.tokens[self.pos][1] if self.pos < len(self.tokens) else len(self.text)

    def parse(self) -> Formula:
        f = self.iff()
        if self.pos < len(self.tokens):
            raise ParseError(f"unexpected trailing token {self.peek()!r}", self.here())
        return f

    def iff(self) -> Formula:
        f = self.imp()
        while self.peek() == "<->":
            self.take()
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(f, self.imp())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok in ("!", "D", "#", "@"):
            self.take()
            arg = self.unary()
            return {"!": Not, "D": Delta, "#": Box, "@": Nabla}[tok](arg)
        return self.atom()

    def atom(self) -> Formula:
        tok, at = self.take()
        if tok == "0":
            return Const(0)
        if tok == "1":
            return Const(1)
        if tok.startswith("ident:"):
            return Var(tok[6:])
        if tok == "(":
            f = self.iff()
            nxt, nat = self.take() if self.pos < len(self.tokens) else (None, len(self.text))
            if nxt != ")":
                raise ParseError("expected ')'", nat if isinstance(nat, int) else len(self.text))
            return f
        raise ParseError(f"expected a formula, got {tok!r}", at)


def parse(text: str) -> Formula:
    return _Parser(text).parse()


# === Printing ===

# Precedence levels; a child is parenthesized when its level is below the
# minimum its position requires under the grammar above.
_LEVEL_IFF, _LEVEL_IMP, _LEVEL_OR, _LEVEL_AND, _LEVEL_UNARY, _LEVEL_ATOM = 1, 2, 3, 4, 5, 6


def _level(f: Formula) -> int:
    if isinstance(f, Iff):
        return _LEVEL_IFF
    if isinstance(f, Implies):
        return _LEVEL_IMP
    if isinstance(f, Or):
        return _LEVEL_OR
    if isinstance(f, And):
        return _LEVEL_AND
    if isinstance(f, _UNARY):
        return _LEVEL_UNARY
    return _LEVEL_ATOM


def format_formula(f: Formula) -> str:
    """Minimal-parentheses text; parse(format_formula(f)) is structurally f.

    ElementLit prints as ``[bits(tail)]`` for reports and is not re-parseable.
    """
    return _fmt(f, 0)


def _fmt(f: Formula, minlevel: int) -> str:
    if isinstance(f, Var):
        s = f.name
    elif isinstance(f, Const):
        s = str(f.value)
    elif isinstance(f, ElementLit):
        s = "[" + format_element(f.element) + "]"
    elif isinstance(f, Not):
        s = "!" + _fmt(f.arg, _LEVEL_UNARY)
    elif isinstance(f, Delta):
        s = "D" + _fmt(f.arg, _LEVEL_UNARY)
    elif isinstance(f, Box):
        s = "#" + _fmt(f.arg, _LEVEL_UNARY)
    elif isinstance(f, Nabla):
        s = "@" + _fmt(f.arg, _LEVEL_UNARY)
    elif isinstance(f, And):
        s = _fmt(f.lhs, _LEVEL_AND) + " & " + _fmt(f.rhs, _LEVEL_UNARY)
    elif isinstance(f, Or):
        s = _fmt(f.lhs, _LEVEL_OR) + " | " + _fmt(f.rhs, _LEVEL_AND)
    elif isinstance(f, Implies):
        s = _fmt(f.lhs, _LEVEL_OR) + " -> " + _fmt(f.rhs, _LEVEL_IMP)
    elif isinstance(f, Iff):
        s = _fmt(f.lhs, _LEVEL_IFF) + " <-> " + _fmt(f.rhs, _LEVEL_IMP)
    else:
        raise TypeError(f"not a formula node: {f!r}")
    return "(" + s + ")" if _level(f) < minlevel else s


# === Structural operations ===


def subformulas(f: Formula) -> Iterator[Formula]:
    """Preorder walk, repeated subterms included each time they occur."""
    yield f
    if isinstance(f, _UNARY):
        yield from subformulas(f.arg)
    elif isinstance(f, _BINARY):
        yield from subformulas(f.lhs)
        yield from subformulas(f.rhs)


def free_vars(f: Formula) -> tuple[str, ...]:
    """Variable names in first-occurrence order."""
    seen: dict[str, None] = {}
    for g in subformulas(f):
        if isinstance(g, Var):
            seen.setdefault(g.name)
    return tuple(seen)


def substitute(f: Formula, bindings: Mapping[str, Formula]) -> Formula:
    """Simultaneous replacement of variables by formulas."""
    if isinstance(f, Var):
        return bindings.get(f.name, f)
    if isinstance(f, (Const, ElementLit)):
        return f
    if isinstance(f, _UNARY):
        return type(f)(substitute(f.arg, bindings))
    return type(f)(substitute(f.lhs, bindings), substitute(f.rhs, bindings))


def _box_of(f: Formula) -> Formula:
    return And(f, Delta(f))


def desugar(f: Formula) -> Formula:
    """Expand Box, Nabla and Iff into the core connectives {0,1,!,&,|,->,D}.

    Box(f) becomes f & Df; Nabla(f) becomes the box-not-box-not-box chain;
    Iff(f,g) becomes (f -> g) & (g -> f).  Idempotent on core formulas.
    """
    if isinstance(f, (Var, Const, ElementLit)):
        return f
    if isinstance(f, Box):
        return _box_of(desugar(f.arg))
    if isinstance(f, Nabla):
        b1 = _box_of(desugar(f.arg))
        b2 = _box_of(Not(b1))
        return _box_of(Not(b2))
    if isinstance(f, Iff):
        l, r = desugar(f.lhs), desugar(f.rhs)
        return And(Implies(l, r), Implies(r, l))
    if isinstance(f, _UNARY):
        return type(f)(desugar(f.arg))
    return type(f)(desugar(f.lhs), desugar(f.rhs))


def _apply_op(f: Formula, args: list[Element]) -> Element:
    if isinstance(f, Not):
        return negate(args[0])
    if isinstance(f, Delta):
        return delta(args[0])
    if isinstance(f, Box):
        return box(args[0])
    if isinstance(f, Nabla):
        return nabla(args[0])
    if isinstance(f, And):
        return meet(args[0], args[1])
    if isinstance(f, Or):
        return join(args[0], args[1])
    if isinstance(f, Implies):
        return elt_implies(args[0], args[1])
    if isinstance(f, Iff):
        return meet(elt_implies(args[0], args[1]), elt_implies(args[1], args[0]))
    raise TypeError(f"not an operator node: {f!r}")


def constant_fold(f: Formula) -> Formula:
    """Replace every maximal closed subterm by the ElementLit of its value.

    Open structure is otherwise untouched; folding a closed formula yields a
    single ElementLit.
    """
    if isinstance(f, Var):
        return f
    if isinstance(f, Const):
        return ElementLit(ONE if f.value else ZERO)
    if isinstance(f, ElementLit):
        return f
    if isinstance(f, _UNARY):
        child = constant_fold(f.arg)
        if isinstance(child, ElementLit):
            return ElementLit(_apply_op(f, [child.element]))
        return type(f)(child)
    l, r = constant_fold(f.lhs), constant_fold(f.rhs)
    if isinstance(l, ElementLit) and isinstance(r, ElementLit):
        return ElementLit(_apply_op(f, [l.element, r.element]))
    return type(f)(l, r)


def modal_depth(f: Formula) -> int:
    """Maximum nesting of the diagonal operator, counting Box as 1 and Nabla as 3."""
    if isinstance(f, (Var, Const, ElementLit)):
        return 0
    if isinstance(f, Delta):
        return 1 + modal_depth(f.arg)
    if isinstance(f, Box):
        return 1 + modal_depth(f.arg)
    if isinstance(f, Nabla):
        return 3 + modal_depth(f.arg)
    if isinstance(f, Not):
        return modal_depth(f.arg)
    return max(modal_depth(f.lhs), modal_depth(f.rhs))


def delta_nodes(f: Formula) -> int:
    """Number of distinct Delta subterms of desugar(f); shared subterms count once."""
    distinct: set[Formula] = set()
    seen: set[int] = set()

    def walk(g: Formula) -> None:
        if id(g) in seen:
            return
        seen.add(id(g))
        if isinstance(g, Delta):
            distinct.add(g)
        if isinstance(g, _UNARY):
            walk(g.arg)
        elif isinstance(g, _BINARY):
            walk(g.lhs)
            walk(g.rhs)

    walk(desugar(f))
    return len(distinct)
