"""
histclaims Core Module

Problems, rules, the historical operator, the axiom catalog with its search
harness and fixtures, and paths of awards.
"""

from .problems import (
    ClaimsProblem,
    History,
    HistoricalProblem,
    PeriodRecord,
    ValidationError,
    aggregates,
    parse_amount,
    validate_allocation,
    validate_historical,
    validate_problem,
)
from .rules import (
    BUILTIN_RULES,
    CEA,
    CEL,
    PROPORTIONAL,
    R_DAGGER,
    TALMUD,
    RuleHandle,
    UnknownName,
    priority_rule,
    register_rule,
    resolve_rule,
    solve_monotone_level,
)
from .operator import (
    GAMMA1,
    GAMMA2,
    PHI,
    OperatorHandle,
    apply_historical,
    apply_historical_iterative,
    register_operator,
    resolve_operator,
    solve_lambda,
)
from .axioms import (
    AxiomId,
    AxiomInstance,
    CheckResult,
    check,
    check_general,
    check_operator_axiom,
    check_standard,
    replay,
    resolve_axiom,
)
from .search import random_historical_problem, search_counterexample
from .fixtures import run_published_fixtures
from .paths import AwardPath, trace_historical, trace_standard

__all__ = [
    "ClaimsProblem",
    "History",
    "HistoricalProblem",
    "PeriodRecord",
    "ValidationError",
    "aggregates",
    "parse_amount",
    "validate_allocation",
    "validate_historical",
    "validate_problem",
    "BUILTIN_RULES",
    "CEA",
    "CEL",
    "PROPORTIONAL",
    "R_DAGGER",
    "TALMUD",
    "RuleHandle",
    "UnknownName",
    "priority_rule",
    "register_rule",
    "resolve_rule",
    "solve_monotone_level",
    "GAMMA1",
    "GAMMA2",
    "PHI",
    "OperatorHandle",
    "apply_historical",
    "apply_historical_iterative",
    "register_operator",
    "resolve_operator",
    "solve_lambda",
    "AxiomId",
    "AxiomInstance",
    "CheckResult",
    "check",
    "check_general",
    "check_operator_axiom",
    "check_standard",
    "replay",
    "resolve_axiom",
    "random_historical_problem",
    "search_counterexample",
    "run_published_fixtures",
    "AwardPath",
    "trace_historical",
    "trace_standard",
]
