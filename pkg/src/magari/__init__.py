"""Exact computation and decision procedures in the free Magari algebra of
ultimately constant 0/1 sequences."""

__version__ = "0.1.0"

from .algebra import (
    Element,
    ONE,
    ZERO,
    box,
    canonicalize,
    coordinate,
    delta,
    delta_power,
    delta_reference,
    elements_up_to,
    format_element,
    join,
    leq,
    meet,
    nabla,
    neg_delta_power,
    negate,
    parse_element,
    project,
)
from .algebra import implies as element_implies
from .decide import (
    Equation,
    Lasso,
    QuasiQuery,
    Transducer,
    Verdict,
    brute_force,
    compile_roots,
    decide,
    lasso_assignment,
    replay,
)
from .expressibility import (
    ClosureResult,
    ParametricWitness,
    PrecompletenessReport,
    check_parametric_witness,
    class_constant,
    delta_definer,
    delta_power_term,
    delta_witness,
    enumerate_closure,
    neg_delta_power_term,
    negation_definer,
    negation_witness,
    off_class_constant,
    pairwise_distinct,
    preserves,
    synthesize_term,
    verify_precompleteness,
    witness_queries,
)
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
    NamedFormula,
    Not,
    Or,
    ParseError,
    Var,
    constant_fold,
    delta_nodes,
    desugar,
    format_formula,
    free_vars,
    modal_depth,
    parse,
    substitute,
)
from .semantics import Assignment, UnboundVariableError, evaluate, evaluate_closed, holds_equation
