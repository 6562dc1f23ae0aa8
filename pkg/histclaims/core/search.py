"""
Counterexample Search Module

Randomized, seeded search for violations of the axiom catalog. Every trial
draws its instance from its own generator seeded with ``(seed, trial)``, so a
search is reproducible and can be split across worker processes without
changing which violation is reported.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .axioms import (
    OPERATOR_AXIOMS,
    AxiomId,
    AxiomInstance,
    CheckResult,
    Scope,
    SignatureMismatch,
    Verdict,
    check,
)
from .operator import OperatorHandle, resolve_operator
from .problems import (
    ClaimsProblem,
    HistoricalProblem,
    History,
    PeriodRecord,
    Vector,
    with_endowment,
)
from .rules import RuleHandle, resolve_rule

DEFAULT_BUDGET = 10_000
MAX_DENOMINATOR = 12
MIN_AGENTS = 2
MAX_AGENTS = 6
MAX_HISTORY = 3

# Endowments and past allocations are drawn on a grid of this many steps.
GRID_STEPS = 24
TIE_PROBABILITY = 0.25

logger = logging.getLogger("histclaims")


def _log(message, level=logging.INFO):
    """Log a message to the histclaims logger.

    Args:
        message: The message to log.
        level: The log level (logging.DEBUG, logging.INFO, logging.WARNING).
    """
    logger.log(level, str(message))


def get_default_workers() -> int:
    """Get the number of search worker processes from the environment.

    Returns:
        The value of ``HISTCLAIMS_WORKERS``, or 1 when unset or invalid.
    """
    raw = os.environ.get("HISTCLAIMS_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        _log(f"Ignoring invalid HISTCLAIMS_WORKERS={raw!r}", logging.WARNING)
        return 1


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------


def _random_amount(rng: np.random.Generator) -> Fraction:
    denominator = int(rng.integers(1, MAX_DENOMINATOR + 1))
    numerator = int(rng.integers(0, MAX_DENOMINATOR * denominator + 1))
    return Fraction(numerator, denominator)


def _grid_point(rng: np.random.Generator, upper: Fraction, lowest: int = 0) -> Fraction:
    return upper * int(rng.integers(lowest, GRID_STEPS + 1)) / GRID_STEPS


def _random_claims(rng: np.random.Generator, n: int) -> Vector:
    claims = [_random_amount(rng) for _ in range(n)]
    if not any(claims):
        claims[0] = Fraction(1)
    return tuple(claims)


def _random_period(rng: np.random.Generator, n: int) -> PeriodRecord:
    claims = tuple(_random_amount(rng) for _ in range(n))
    allocations = tuple(_grid_point(rng, c) for c in claims)
    return PeriodRecord(claims, allocations)


def _tie(vector: Vector) -> Vector:
    return (vector[0], vector[0]) + vector[2:]


def random_historical_problem(
    rng: np.random.Generator,
    n: Optional[int] = None,
    with_history: bool = True,
) -> HistoricalProblem:
    """Draw a valid historical problem.

    Claims and past claims have denominators up to ``MAX_DENOMINATOR``;
    the endowment and each past allocation sit on a grid of their upper
    bound. With probability ``TIE_PROBABILITY`` agents 1 and 2 get identical
    data so the equal-treatment premises actually fire.

    Args:
        rng: Source of randomness.
        n: Number of agents; drawn from ``[MIN_AGENTS, MAX_AGENTS]`` if None.
        with_history: When False the history is empty.

    Returns:
        A problem that passes :func:`validate_historical`.
    """
    if n is None:
        n = int(rng.integers(MIN_AGENTS, MAX_AGENTS + 1))
    claims = list(_random_claims(rng, n))
    length = int(rng.integers(0, MAX_HISTORY + 1)) if with_history else 0
    periods = [_random_period(rng, n) for _ in range(length)]
    if n >= 2 and rng.random() < TIE_PROBABILITY:
        claims[1] = claims[0]
        periods = [PeriodRecord(_tie(p.claims), _tie(p.allocations)) for p in periods]
        if not any(claims):
            claims[0] = claims[1] = Fraction(1)
    total = sum(claims, Fraction(0))
    endowment = _grid_point(rng, total)
    agents = tuple(range(1, n + 1))
    return HistoricalProblem(
        ClaimsProblem(agents, tuple(claims), endowment), History(tuple(periods))
    )


def _interior_endowment(rng: np.random.Generator, hp: HistoricalProblem) -> HistoricalProblem:
    total = hp.problem.total_claims
    if 0 < hp.endowment < total:
        return hp
    return with_endowment(hp, total * int(rng.integers(1, GRID_STEPS)) / GRID_STEPS)


def _enlarge(rng: np.random.Generator, hp: HistoricalProblem) -> HistoricalProblem:
    extra = int(rng.integers(1, 3))
    newcomers = tuple(max(hp.agents) + k for k in range(1, extra + 1))
    claims = hp.claims + _random_claims(rng, extra)
    periods = []
    for period in hp.history.periods:
        added = _random_period(rng, extra)
        periods.append(
            PeriodRecord(period.claims + added.claims, period.allocations + added.allocations)
        )
    problem = ClaimsProblem(hp.agents + newcomers, claims, hp.endowment)
    return HistoricalProblem(problem, History(tuple(periods)))


def random_instance(
    axiom: AxiomId, rng: np.random.Generator, with_history: bool = True
) -> AxiomInstance:
    """Draw an instance carrying every field ``axiom`` needs."""
    axiom = AxiomId(axiom)
    hp = random_historical_problem(rng, with_history=with_history)

    if axiom is AxiomId.ANONYMITY:
        permutation = tuple(int(a) for a in rng.permutation(np.array(hp.agents)))
        return AxiomInstance(hp, permutation=permutation)
    if axiom is AxiomId.SCALE_INVARIANCE:
        rho = Fraction(int(rng.integers(1, 13)), int(rng.integers(1, 13)))
        return AxiomInstance(hp, scale=rho)
    if axiom is AxiomId.COMPOSITION_UP:
        hp = _interior_endowment(rng, hp)
        first = hp.endowment * int(rng.integers(1, GRID_STEPS)) / GRID_STEPS
        return AxiomInstance(hp, endowments=(first, hp.endowment - first))
    if axiom in (AxiomId.COMPOSITION_DOWN, AxiomId.RESOURCE_MONOTONICITY):
        hp = _interior_endowment(rng, hp)
        gap = hp.problem.total_claims - hp.endowment
        larger = hp.endowment + gap * int(rng.integers(1, GRID_STEPS + 1)) / GRID_STEPS
        return AxiomInstance(hp, other_endowment=larger)
    if axiom is AxiomId.CLAIMS_MONOTONICITY:
        k = int(rng.integers(0, hp.size))
        raise_by = _random_amount(rng) or Fraction(1)
        return AxiomInstance(hp, claim_increase=(hp.agents[k], hp.claims[k] + raise_by))
    if axiom is AxiomId.POPULATION_MONOTONICITY:
        return AxiomInstance(hp, enlarged=_enlarge(rng, hp))
    if axiom is AxiomId.CONSISTENCY:
        size = int(rng.integers(1, hp.size))
        chosen = rng.choice(np.array(hp.agents), size=size, replace=False)
        return AxiomInstance(hp, subgroup=tuple(sorted(int(a) for a in chosen)))
    return AxiomInstance(hp)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def _trial(
    axiom: AxiomId,
    rule: RuleHandle,
    op: Optional[OperatorHandle],
    seed: int,
    trial: int,
) -> CheckResult:
    rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
    instance = random_instance(axiom, rng, with_history=op is not None)
    return check(axiom, rule, op, instance)


def _scan(
    axiom: AxiomId,
    rule: RuleHandle,
    op: Optional[OperatorHandle],
    seed: int,
    start: int,
    stop: int,
) -> Optional[Tuple[int, CheckResult]]:
    for trial in range(start, stop):
        result = _trial(axiom, rule, op, seed, trial)
        if not result.holds:
            return trial, result
    return None


def _scan_by_name(
    axiom: str, rule_name: str, op_name: Optional[str], seed: int, start: int, stop: int
) -> Optional[Tuple[int, CheckResult]]:
    rule = resolve_rule(rule_name)
    op = resolve_operator(op_name) if op_name is not None else None
    _log(f"Shard {start}-{stop} started", logging.DEBUG)
    return _scan(AxiomId(axiom), rule, op, seed, start, stop)


def _shards(budget: int, workers: int) -> List[Tuple[int, int]]:
    size = -(-budget // workers)
    return [(start, min(start + size, budget)) for start in range(0, budget, size)]


def search_counterexample(
    axiom: AxiomId,
    rule: RuleHandle,
    op: Optional[OperatorHandle] = None,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    workers: Optional[int] = None,
) -> CheckResult:
    """Search ``budget`` random instances for a violation of ``axiom``.

    Args:
        axiom: The axiom to test.
        rule: The standard rule.
        op: The operator to extend it with; None searches the standard
            axiom on problems without history.
        budget: Number of trials.
        seed: Base seed; trial ``k`` uses ``SeedSequence([seed, k])``.
        workers: Worker processes; defaults to :func:`get_default_workers`.
            Workers re-resolve the rule and operator by name, so they must
            be registered at import time.

    Returns:
        The violation with the lowest trial index, with ``trials`` set to
        the number of trials up to and including it; otherwise a holds
        result with ``trials == budget``.

    Raises:
        ValueError: If ``budget`` is not positive.
        SignatureMismatch: If an operator axiom is searched without an
            operator.
    """
    axiom = AxiomId(axiom)
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")
    if axiom in OPERATOR_AXIOMS and op is None:
        raise SignatureMismatch(f"{axiom.value} needs an operator")
    workers = workers if workers is not None else get_default_workers()
    workers = max(1, min(workers, budget))
    label = f"{axiom.value} / {rule.name} / {op.name if op else 'standard'}"
    _log(f"Searching {label}: budget={budget}, seed={seed}, workers={workers}")

    if workers == 1:
        found = _scan(axiom, rule, op, seed, 0, budget)
    else:
        op_name = op.name if op is not None else None
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_scan_by_name, axiom.value, rule.name, op_name, seed, start, stop)
                for start, stop in _shards(budget, workers)
            ]
            hits = [f.result() for f in futures]
        hits = [hit for hit in hits if hit is not None]
        found = min(hits, key=lambda hit: hit[0]) if hits else None

    if found is None:
        _log(f"No violation of {label} in {budget} trials")
        scope = Scope.OPERATOR if axiom in OPERATOR_AXIOMS else (
            Scope.STANDARD if op is None else Scope.GENERAL
        )
        return CheckResult(axiom, Verdict.HOLDS, None, scope, trials=budget)
    trial, result = found
    _log(f"Violation of {label} at trial {trial}", logging.WARNING)
    return replace(result, trials=trial + 1)
