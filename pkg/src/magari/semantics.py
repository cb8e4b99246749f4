"""Evaluation of formulas to algebra elements under variable assignments."""

from __future__ import annotations

from typing import Mapping

from .algebra import Element, ONE, ZERO, box, delta, implies, join, meet, nabla, negate
from .formulas import (
    And,
    Box,
    Const,
    Delta,
    ElementLit,
    Formula,
    Iff,
    Implies,
    Nabla,
    Not,
    Or,
    Var,
)

Assignment = Mapping[str, Element]


class UnboundVariableError(Exception):
    def __init__(self, name: str):
        super().__init__(f"unbound variable '{name}'")
        self.name = name


def evaluate(f: Formula, assignment: Assignment) -> Element:
    if isinstance(f, Var):
        try:
            return assignment[f.name]
        except KeyError:
            raise UnboundVariableError(f.name) from None
    if isinstance(f, Const):
        return ONE if f.value else ZERO
    if isinstance(f, ElementLit):
        return f.element
    if isinstance(f, Not):
        return negate(evaluate(f.arg, assignment))
    if isinstance(f, Delta):
        return delta(evaluate(f.arg, assignment))
    if isinstance(f, Box):
        return box(evaluate(f.arg, assignment))
    if isinstance(f, Nabla):
        return nabla(evaluate(f.arg, assignment))
    if isinstance(f, And):
        return meet(evaluate(f.lhs, assignment), evaluate(f.rhs, assignment))
    if isinstance(f, Or):
        return join(evaluate(f.lhs, assignment), evaluate(f.rhs, assignment))
    if isinstance(f, Implies):
        return implies(evaluate(f.lhs, assignment), evaluate(f.rhs, assignment))
    if isinstance(f, Iff):
        a = evaluate(f.lhs, assignment)
        b = evaluate(f.rhs, assignment)
        return meet(implies(a, b), implies(b, a))
    raise TypeError(f"not a formula node: {f!r}")


def evaluate_closed(f: Formula) -> Element:
    return evaluate(f, {})


def holds_equation(lhs: Formula, rhs: Formula, assignment: Assignment) -> bool:
    """Whether both sides evaluate to the same element (equal at every coordinate)."""
    return evaluate(lhs, assignment) == evaluate(rhs, assignment)
