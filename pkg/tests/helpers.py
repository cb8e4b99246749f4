"""Shared test utilities: seeded generators and componentwise reference ops."""

from __future__ import annotations

import random

from magari import (
    And,
    Box,
    Const,
    Delta,
    Element,
    Equation,
    Formula,
    Iff,
    Implies,
    Nabla,
    Not,
    Or,
    QuasiQuery,
    Var,
    canonicalize,
    delta_reference,
)

# === Componentwise reference operations on truncations ===


def bits_not(v):
    return tuple(1 - b for b in v)


def bits_and(u, v):
    return tuple(a & b for a, b in zip(u, v))


def bits_or(u, v):
    return tuple(a | b for a, b in zip(u, v))


def bits_implies(u, v):
    return tuple((1 - a) | b for a, b in zip(u, v))


def box_reference(v):
    # cumulative conjunction including the current coordinate
    return bits_and(v, delta_reference(v))


def nabla_reference(v):
    return box_reference(bits_not(box_reference(bits_not(box_reference(v)))))


# === Seeded random generators ===


def random_element(rng: random.Random, max_prefix: int) -> Element:
    n = rng.randint(0, max_prefix)
    bits = [rng.randint(0, 1) for _ in range(n)]
    return canonicalize(bits, rng.randint(0, 1))


def random_formula(rng: random.Random, variables, size: int, modal_budget: int = 4) -> Formula:
    if size <= 1:
        if variables and rng.random() < 0.75:
            return Var(rng.choice(variables))
        return Const(rng.choice((0, 1)))
    pool = ["not", "and", "or", "imp", "iff"]
    if modal_budget >= 1:
        pool += ["delta", "delta", "box"]
    if modal_budget >= 3:
        pool += ["nabla"]
    kind = rng.choice(pool)
    if kind == "not":
        return Not(random_formula(rng, variables, size - 1, modal_budget))
    if kind == "delta":
        return Delta(random_formula(rng, variables, size - 1, modal_budget - 1))
    if kind == "box":
        return Box(random_formula(rng, variables, size - 1, modal_budget - 1))
    if kind == "nabla":
        return Nabla(random_formula(rng, variables, size - 1, modal_budget - 3))
    cls = {"and": And, "or": Or, "imp": Implies, "iff": Iff}[kind]
    left = rng.randint(1, size - 1)
    return cls(
        random_formula(rng, variables, left, modal_budget),
        random_formula(rng, variables, size - left, modal_budget),
    )


def random_query(rng: random.Random, max_vars: int = 3) -> QuasiQuery:
    """Random quasi-identity mixing satisfiable, valid and refutable shapes."""
    variables = ["p", "q", "r"][: rng.randint(1, max_vars)]

    def side(max_size: int = 8) -> Formula:
        return random_formula(rng, variables, rng.randint(2, max_size), 4)

    hyps = tuple(Equation(side(5), side(5)) for _ in range(rng.choice((0, 0, 0, 1, 1, 2))))
    concls = []
    for _ in range(rng.randint(1, 2)):
        roll = rng.random()
        if roll < 0.15:
            f = side()
            concls.append(Equation(f, f))
        elif roll < 0.30:
            g = random_formula(rng, variables, rng.randint(1, 4), 2)
            concls.append(Equation(Delta(Implies(Delta(g), g)), Delta(g)))
        else:
            concls.append(Equation(side(), side()))
    return QuasiQuery(hyps, tuple(concls))
