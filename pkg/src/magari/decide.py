"""Deciding equations and quasi-identities over ultimately constant sequences.

A list of formulas compiles into one deterministic transducer over their
shared term DAG.  Each distinct Delta subterm owns a single monotone memory
bit, initially 1, holding the conjunction of its child's outputs at all
earlier steps; feeding the letters of an assignment (one bit per variable
per coordinate) produces the coordinates of every root's value in lockstep.

A quasi-identity "hypotheses entail conclusions" fails exactly when some
ultimately constant assignment satisfies every hypothesis equation at every
coordinate while some conclusion equation differs somewhere.  Memory bits
only ever decrease and literal streams are constant past their prefixes, so
(memory bits, capped step index) ranges over a finite configuration space and
the search below is exact on the intended carrier:

  1. breadth-first exploration of configurations along hypothesis-true
     transitions from the all-ones start;
  2. a configuration is SAFE when some single letter, repeated, keeps the
     hypotheses true through stabilization (reached within state-width plus
     position-cap steps, by monotonicity) and at the resulting fixpoint;
  3. a counterexample is a hypothesis-true transition that violates some
     conclusion and whose successor reaches a SAFE configuration along
     hypothesis-true transitions.

Letters are explored lexicographically smallest first and configurations in
discovery order, so the returned lasso is deterministic.  brute_force is an
independent refutation oracle: it enumerates whole assignment boxes and
evaluates on explicit truncations, with delta realized as a
cumulative-conjunction scan rather than transducer memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .algebra import Element, canonicalize, coordinate, elements_up_to
from .formulas import (
    And,
    Delta,
    ElementLit,
    Formula,
    Implies,
    Not,
    Or,
    Var,
    constant_fold,
    desugar,
    free_vars,
    modal_depth,
)
from .semantics import UnboundVariableError, holds_equation

Letter = tuple[int, ...]


@dataclass(frozen=True)
class Equation:
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class QuasiQuery:
    """hypotheses entail conclusions; an identity has no hypotheses."""

    hypotheses: tuple[Equation, ...]
    conclusions: tuple[Equation, ...]

    def __post_init__(self) -> None:
        if not self.conclusions:
            raise ValueError("a query needs at least one conclusion equation")


@dataclass(frozen=True)
class Lasso:
    """An ultimately constant word: prefix letters, then one letter repeated.

    Letters carry one bit per variable, aligned with ``variables``.  The
    violation step is the 1-based coordinate at which some conclusion differs.
    """

    variables: tuple[str, ...]
    prefix: tuple[Letter, ...]
    loop_letter: Letter
    violation_step: int


@dataclass(frozen=True)
class Verdict:
    valid: bool
    lasso: Lasso | None = None


# === Shared term DAG and transducer ===


@dataclass(frozen=True)
class _Dag:
    # ops: ("var", vi) ("lit", Element) ("not", a) ("and", a, b) ("or", a, b)
    #      ("imp", a, b) ("delta", a, state_bit); children precede parents
    nodes: tuple[tuple, ...]
    roots: tuple[int, ...]
    variables: tuple[str, ...]
    state_width: int
    position_cap: int


def _flatten(roots: Sequence[Formula]) -> _Dag:
    names = sorted({v for r in roots for v in free_vars(r)})
    var_index = {v: i for i, v in enumerate(names)}
    normalized = [constant_fold(desugar(r)) for r in roots]

    index: dict[tuple, int] = {}
    nodes: list[tuple] = []
    state = 0

    def intern(key: tuple, op: tuple) -> int:
        got = index.get(key)
        if got is None:
            nodes.append(op)
            got = index[key] = len(nodes) - 1
        return got

    def build(f: Formula) -> int:
        nonlocal state
        if isinstance(f, Var):
            return intern(("var", f.name), ("var", var_index[f.name]))
        if isinstance(f, ElementLit):
            return intern(("lit", f.element), ("lit", f.element))
        if isinstance(f, Not):
            a = build(f.arg)
            return intern(("not", a), ("not", a))
        if isinstance(f, Delta):
            a = build(f.arg)
            key = ("delta", a)
            if key not in index:
                nodes.append(("delta", a, state))
                index[key] = len(nodes) - 1
                state += 1
            return index[key]
        if isinstance(f, And):
            a, b = build(f.lhs), build(f.rhs)
            return intern(("and", a, b), ("and", a, b))
        if isinstance(f, Or):
            a, b = build(f.lhs), build(f.rhs)
            return intern(("or", a, b), ("or", a, b))
        if isinstance(f, Implies):
            a, b = build(f.lhs), build(f.rhs)
            return intern(("imp", a, b), ("imp", a, b))
        raise TypeError(f"unexpected node after desugar and fold: {f!r}")

    root_ids = tuple(build(r) for r in normalized)
    cap = 1 + max((len(op[1].prefix) for op in nodes if op[0] == "lit"), default=0)
    return _Dag(tuple(nodes), root_ids, tuple(names), state, cap)


class Transducer:
    """Letter-to-letter machine producing root coordinates step by step."""

    def __init__(self, dag: _Dag):
        self._dag = dag
        self.variables = dag.variables
        self.state_width = dag.state_width
        self.initial_state = (1 << dag.state_width) - 1
        self.position_cap = dag.position_cap
        self.root_count = len(dag.roots)

    def next_position(self, position: int) -> int:
        return min(position + 1, self.position_cap)

    def step(self, state: int, position: int, letter: Letter) -> tuple[tuple[int, ...], int]:
        """Outputs of every root at this step, and the successor memory.

        A delta node emits its memory bit (the past conjunction, 1 at step 1)
        and then conjoins its child's current output into that bit.
        """
        nodes = self._dag.nodes
        out = [0] * len(nodes)
        new_state = state
        for i, op in enumerate(nodes):
            kind = op[0]
            if kind == "var":
                out[i] = letter[op[1]]
            elif kind == "lit":
                e = op[1]
                out[i] = e.prefix[position - 1] if position <= len(e.prefix) else e.tail
            elif kind == "not":
                out[i] = 1 - out[op[1]]
            elif kind == "and":
                out[i] = out[op[1]] & out[op[2]]
            elif kind == "or":
                out[i] = out[op[1]] | out[op[2]]
            elif kind == "imp":
                out[i] = (1 - out[op[1]]) | out[op[2]]
            else:
                bit = op[2]
                cur = (state >> bit) & 1
                out[i] = cur
                if cur and not out[op[1]]:
                    new_state &= ~(1 << bit)
        return tuple(out[r] for r in self._dag.roots), new_state

    def run(self, assignment, n: int) -> list[tuple[int, ...]]:
        """Root outputs for steps 1..n under the given element assignment."""
        rows = []
        state, pos = self.initial_state, 1
        for k in range(1, n + 1):
            try:
                letter = tuple(coordinate(assignment[v], k) for v in self.variables)
            except KeyError as e:
                raise UnboundVariableError(e.args[0]) from None
            outs, state = self.step(state, pos, letter)
            rows.append(outs)
            pos = self.next_position(pos)
        return rows


def compile_roots(roots: Sequence[Formula]) -> Transducer:
    """Compile formulas jointly: desugared, constant folded, subterms shared."""
    return Transducer(_flatten(roots))


# === Quasi-identity decision ===

_Config = tuple[int, int]  # (memory bits, capped position)


def decide(query: QuasiQuery) -> Verdict:
    """Valid, or a deterministic lasso counterexample on the intended carrier."""
    eqs = query.hypotheses + query.conclusions
    t = compile_roots([side for eq in eqs for side in (eq.lhs, eq.rhs)])
    nh = len(query.hypotheses)
    nc = len(query.conclusions)
    letters: list[Letter] = [tuple(bits) for bits in product((0, 1), repeat=len(t.variables))]

    def outcome(outs: tuple[int, ...]) -> tuple[bool, bool]:
        hyp_ok = all(outs[2 * i] == outs[2 * i + 1] for i in range(nh))
        viol = any(outs[2 * j] != outs[2 * j + 1] for j in range(nh, nh + nc))
        return hyp_ok, viol

    # Phase 1: hypothesis-true reachability.
    start: _Config = (t.initial_state, 1)
    order: list[_Config] = [start]
    parent: dict[_Config, tuple[_Config, Letter] | None] = {start: None}
    edges: dict[tuple[_Config, Letter], tuple[_Config, bool]] = {}
    qi = 0
    while qi < len(order):
        cfg = order[qi]
        qi += 1
        state, pos = cfg
        for letter in letters:
            outs, ns = t.step(state, pos, letter)
            hyp_ok, viol = outcome(outs)
            if not hyp_ok:
                continue
            succ = (ns, t.next_position(pos))
            edges[(cfg, letter)] = (succ, viol)
            if succ not in parent:
                parent[succ] = (cfg, letter)
                order.append(succ)

    # Phase 2: SAFE configurations and everything that reaches one.
    max_iter = t.position_cap + t.state_width + 2

    def safe_letter(cfg: _Config) -> Letter | None:
        for letter in letters:
            cur = cfg
            for _ in range(max_iter):
                outs, ns = t.step(cur[0], cur[1], letter)
                hyp_ok, _ = outcome(outs)
                if not hyp_ok:
                    break
                nxt = (ns, t.next_position(cur[1]))
                if nxt == cur:
                    return letter
                cur = nxt
            else:
                raise AssertionError("no fixpoint within the monotone stabilization bound")
        return None

    safe_cache: dict[_Config, Letter | None] = {}

    def get_safe(cfg: _Config) -> Letter | None:
        if cfg not in safe_cache:
            safe_cache[cfg] = safe_letter(cfg)
        return safe_cache[cfg]

    good: set[_Config] = {c for c in order if get_safe(c) is not None}
    radj: dict[_Config, list[_Config]] = {}
    for (cfg, _letter), (succ, _v) in edges.items():
        radj.setdefault(succ, []).append(cfg)
    stack = list(good)
    while stack:
        c = stack.pop()
        for p in radj.get(c, ()):
            if p not in good:
                good.add(p)
                stack.append(p)

    # Phase 3: first violating transition whose successor stays satisfiable.
    for cfg in order:
        for letter in letters:
            edge = edges.get((cfg, letter))
            if edge is None:
                continue
            succ, viol = edge
            if viol and succ in good:
                return Verdict(False, _build_lasso(t, parent, edges, letters, get_safe, cfg, letter, succ))
    return Verdict(True)


def _build_lasso(t, parent, edges, letters, get_safe, cfg, letter, succ) -> Lasso:
    def path_to(c: _Config) -> list[Letter]:
        back: list[Letter] = []
        while parent[c] is not None:
            pc, pl = parent[c]
            back.append(pl)
            c = pc
        back.reverse()
        return back

    def path_to_safe(c: _Config) -> tuple[list[Letter], _Config]:
        if get_safe(c) is not None:
            return [], c
        par: dict[_Config, tuple[_Config, Letter] | None] = {c: None}
        queue = [c]
        qi = 0
        while qi < len(queue):
            cur = queue[qi]
            qi += 1
            for let in letters:
                edge = edges.get((cur, let))
                if edge is None:
                    continue
                s, _ = edge
                if s in par:
                    continue
                par[s] = (cur, let)
                if get_safe(s) is not None:
                    back: list[Letter] = []
                    node = s
                    while par[node] is not None:
                        pc, pl = par[node]
                        back.append(pl)
                        node = pc
                    back.reverse()
                    return back, s
                queue.append(s)
        raise AssertionError("successor marked good but no safe path found")

    pre = path_to(cfg)
    tail_path, safe_cfg = path_to_safe(succ)
    loop = get_safe(safe_cfg)
    assert loop is not None
    return Lasso(
        variables=t.variables,
        prefix=tuple(pre) + (letter,) + tuple(tail_path),
        loop_letter=loop,
        violation_step=len(pre) + 1,
    )


# === Lasso replay ===


def lasso_assignment(lasso: Lasso) -> dict[str, Element]:
    """The ultimately constant assignment a lasso denotes, canonicalized."""
    width = len(lasso.variables)
    if len(lasso.loop_letter) != width:
        raise ValueError("malformed lasso: loop letter width does not match variables")
    for let in lasso.prefix:
        if len(let) != width:
            raise ValueError("malformed lasso: prefix letter width does not match variables")
    for let in lasso.prefix + (lasso.loop_letter,):
        if any(b not in (0, 1) for b in let):
            raise ValueError("malformed lasso: letters must be 0/1 bits")
    if lasso.violation_step < 1:
        raise ValueError("malformed lasso: violation step must be >= 1")
    return {
        v: canonicalize((let[j] for let in lasso.prefix), lasso.loop_letter[j])
        for j, v in enumerate(lasso.variables)
    }


def replay(lasso: Lasso, query: QuasiQuery) -> bool:
    """Exact-evaluation check that the lasso refutes the query.

    True iff every hypothesis holds as an element equality and some
    conclusion fails.  Raises on malformed lassos instead of returning False.
    """
    assignment = lasso_assignment(lasso)
    if not all(holds_equation(eq.lhs, eq.rhs, assignment) for eq in query.hypotheses):
        return False
    return any(not holds_equation(eq.lhs, eq.rhs, assignment) for eq in query.conclusions)


# === Independent brute-force oracle ===


def _encode(e: Element, width: int) -> int:
    mask = 0
    for j, b in enumerate(e.prefix):
        mask |= b << j
    if e.tail:
        mask |= ((1 << width) - 1) ^ ((1 << len(e.prefix)) - 1)
    return mask


def _delta_scan(m, t, width: int, full):
    """Cumulative-conjunction delta on width-bit truncations (bit j = coordinate j+1)."""
    if np.any((m == full) & (t == 0)):
        raise AssertionError("truncation width exceeded in oracle")
    one = np.uint64(1)
    pa = m
    s = 1
    while s < width:
        fill = np.uint64((1 << s) - 1)
        pa = pa & (((pa << np.uint64(s)) | fill) & full)
        s <<= 1
    dm = ((pa << one) | one) & full
    dt = (pa >> np.uint64(width - 1)) & t
    return dm, dt


def brute_force(query: QuasiQuery, bound: int) -> dict[str, Element] | None:
    """First assignment in the box (prefix length <= bound per variable) that
    satisfies all hypotheses and violates some conclusion, else None.

    Refutation is conclusive; None only rules out the searched box.  The
    enumeration order is elements_up_to(bound) per variable, earlier
    variables (sorted by name) varying slowest.
    """
    if bound < 0:
        raise ValueError(f"bound must be >= 0, got {bound}")
    eqs = query.hypotheses + query.conclusions
    dag = _flatten([side for eq in eqs for side in (eq.lhs, eq.rhs)])
    normalized_depth = max(
        (modal_depth(constant_fold(desugar(side))) for eq in eqs for side in (eq.lhs, eq.rhs)),
        default=0,
    )
    max_lit = max((len(op[1].prefix) for op in dag.nodes if op[0] == "lit"), default=0)
    width = max(bound, max_lit) + normalized_depth + 2
    if width > 62:
        raise ValueError(f"oracle truncation width {width} exceeds 62 bits")
    full = np.uint64((1 << width) - 1)

    elements = elements_up_to(bound)
    n = len(elements)
    k = len(dag.variables)
    if k:
        total = n**k
        mask_tab = np.array([_encode(e, width) for e in elements], dtype=np.uint64)
        tail_tab = np.array([e.tail for e in elements], dtype=np.uint64)
        grids = np.meshgrid(*([np.arange(n)] * k), indexing="ij")
        var_vals = [(mask_tab[g.ravel()], tail_tab[g.ravel()]) for g in grids]
    else:
        total = 1
        var_vals = []

    one = np.uint64(1)
    vals: list[tuple] = []
    for op in dag.nodes:
        kind = op[0]
        if kind == "var":
            vals.append(var_vals[op[1]])
        elif kind == "lit":
            vals.append((np.uint64(_encode(op[1], width)), np.uint64(op[1].tail)))
        elif kind == "not":
            m, t = vals[op[1]]
            vals.append(((~m) & full, t ^ one))
        elif kind == "and":
            m1, t1 = vals[op[1]]
            m2, t2 = vals[op[2]]
            vals.append((m1 & m2, t1 & t2))
        elif kind == "or":
            m1, t1 = vals[op[1]]
            m2, t2 = vals[op[2]]
            vals.append((m1 | m2, t1 | t2))
        elif kind == "imp":
            m1, t1 = vals[op[1]]
            m2, t2 = vals[op[2]]
            vals.append((((~m1) & full) | m2, (t1 ^ one) | t2))
        else:
            m, t = vals[op[1]]
            vals.append(_delta_scan(m, t, width, full))

    def eq_bits(i: int):
        m1, t1 = vals[dag.roots[2 * i]]
        m2, t2 = vals[dag.roots[2 * i + 1]]
        return (m1 == m2) & (t1 == t2)

    nh = len(query.hypotheses)
    hyp_all = np.bool_(True)
    for i in range(nh):
        hyp_all = hyp_all & eq_bits(i)
    viol = np.bool_(False)
    for j in range(nh, nh + len(query.conclusions)):
        viol = viol | ~eq_bits(j)

    bad = np.broadcast_to(hyp_all & viol, (total,))
    hits = np.flatnonzero(bad)
    if hits.size == 0:
        return None
    coords = np.unravel_index(int(hits[0]), (n,) * k) if k else ()
    return {v: elements[int(c)] for v, c in zip(dag.variables, coords)}
