"""
Historical Operator Module

Extends standard rules to claims problems with history. The historical
operator applies the rule to history-adjusted claims and then clamps the
tentative awards at present claims, adding a common amount lambda until the
endowment is exhausted. Two independence operators used to separate the
operator's characterizing axioms are provided alongside it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Sequence, Tuple

from .problems import (
    ClaimsProblem,
    HistoricalProblem,
    Vector,
    aggregates,
    validate_historical,
)
from .rules import LevelKind, RuleHandle, UnknownName, cel, solve_monotone_level


class WindowViolated(ValueError):
    """The endowment lies outside ``[sum(min(c, t)), sum(c)]``.

    This only happens when the tentative vector is not balanced, i.e. the
    rule that produced it is not a proper rule.
    """


@dataclass(frozen=True)
class HistoricalSolution:
    """Result of the historical operator.

    Attributes:
        awards: Final allocation ``min(c_i, tentative_i + lambda_)``.
        lambda_: The common adjustment; the smallest valid one when ``C == E``.
        tentative: ``R(N, c~, E)``.
        satiated: Positions ``i`` with ``awards_i == c_i`` and
            ``tentative_i + lambda_ > c_i``.
    """

    awards: Vector
    lambda_: Fraction
    tentative: Vector
    satiated: FrozenSet[int]


@dataclass(frozen=True)
class Stage:
    members: FrozenSet[int]
    excess: Fraction


@dataclass(frozen=True)
class IterativeTrace:
    """Stages of the waterfall procedure, the last one always empty."""

    stages: Tuple[Stage, ...]
    final_set: FrozenSet[int]


@dataclass(frozen=True)
class OperatorHandle:
    """A named extension operator mapping (rule, historical problem) to awards."""

    name: str
    extend: Callable[[RuleHandle, HistoricalProblem], Vector]

    def __call__(self, rule: RuleHandle, hp: HistoricalProblem) -> Vector:
        return self.extend(rule, hp)


def tentative_awards(rule: RuleHandle, hp: HistoricalProblem) -> Vector:
    """Apply ``rule`` to the history-adjusted problem ``(N, c~, E)``."""
    validate_historical(hp)
    adjusted = aggregates(hp).adjusted_claims
    return rule(ClaimsProblem(hp.agents, adjusted, hp.endowment))


def solve_lambda(
    claims: Sequence[Fraction], tentative: Sequence[Fraction], endowment: Fraction
) -> Fraction:
    """Find the lambda that balances ``sum(min(c_i, t_i + lambda)) = E``.

    Args:
        claims: Present claims.
        tentative: Tentative awards ``R(N, c~, E)``.
        endowment: Present endowment.

    Returns:
        The unique lambda when ``sum(claims) > endowment``; the smallest one
        when they are equal.

    Raises:
        WindowViolated: If the endowment is outside the attainable window.
    """
    floor = sum((min(c, t) for c, t in zip(claims, tentative)), Fraction(0))
    total = sum(claims, Fraction(0))
    if endowment < floor or endowment > total:
        raise WindowViolated(
            f"Endowment {endowment} outside [{floor}, {total}]; "
            "the tentative awards are not balanced"
        )
    return solve_monotone_level(LevelKind.CAP, tentative, claims, endowment).value


def apply_historical(rule: RuleHandle, hp: HistoricalProblem) -> HistoricalSolution:
    """Evaluate the historical operator for ``rule`` on ``hp``.

    Raises:
        ValidationError: If ``hp`` is invalid.
        WindowViolated: If ``rule`` returns an unbalanced vector.
    """
    tentative = tentative_awards(rule, hp)
    lam = solve_lambda(hp.claims, tentative, hp.endowment)
    awards = tuple(min(c, t + lam) for c, t in zip(hp.claims, tentative))
    satiated = frozenset(
        i for i, (c, t) in enumerate(zip(hp.claims, tentative)) if t + lam > c
    )
    return HistoricalSolution(awards, lam, tentative, satiated)


def apply_historical_iterative(
    rule: RuleHandle, hp: HistoricalProblem
) -> Tuple[HistoricalSolution, IterativeTrace]:
    """Evaluate the historical operator through the staged waterfall.

    Agents whose running award exceeds their claim are satiated stage by
    stage; their excess is split equally among the agents still rationed.
    The awards always equal those of :func:`apply_historical`. The reported
    lambda is the accumulated equal share, which is the closed-form lambda
    whenever ``C > E``.
    """
    tentative = tentative_awards(rule, hp)
    claims = hp.claims
    remaining = list(range(hp.size))
    share = Fraction(0)
    stages = []
    satiated = set()
    while True:
        members = [i for i in remaining if tentative[i] + share > claims[i]]
        excess = sum((tentative[i] + share - claims[i] for i in members), Fraction(0))
        stages.append(Stage(frozenset(hp.agents[i] for i in members), excess))
        if not members:
            break
        satiated.update(members)
        remaining = [i for i in remaining if i not in satiated]
        if not remaining:
            raise WindowViolated(
                "Every agent was satiated before the excess was absorbed; "
                "the tentative awards are not balanced"
            )
        share += excess / len(remaining)

    awards = tuple(
        claims[i] if i in satiated else tentative[i] + share for i in range(hp.size)
    )
    if sum(awards, Fraction(0)) != hp.endowment:
        raise WindowViolated("The tentative awards are not balanced")
    solution = HistoricalSolution(awards, share, tentative, frozenset(satiated))
    trace = IterativeTrace(
        tuple(stages), frozenset(hp.agents[i] for i in satiated)
    )
    return solution, trace


def _independence_branch(hp: HistoricalProblem) -> bool:
    return hp.size == 2 and max(hp.claims) < hp.endowment


def gamma1(rule: RuleHandle, hp: HistoricalProblem) -> Vector:
    """Operator that fully honors agent 1 in two-agent problems with ``max(c) < E``.

    ``E - c_1`` is a valid award for agent 2 there, since
    ``max(c_1, c_2) < E <= c_1 + c_2`` gives ``0 < E - c_1 <= c_2``.
    """
    validate_historical(hp)
    if _independence_branch(hp):
        first = hp.claims[0]
        return (first, hp.endowment - first)
    return apply_historical(rule, hp).awards


def gamma2(rule: RuleHandle, hp: HistoricalProblem) -> Vector:
    """Operator that applies CEL to present claims in two-agent problems with ``max(c) < E``."""
    validate_historical(hp)
    if _independence_branch(hp):
        return cel(hp.problem)
    return apply_historical(rule, hp).awards


PHI = OperatorHandle("phi", lambda rule, hp: apply_historical(rule, hp).awards)
GAMMA1 = OperatorHandle("gamma1", gamma1)
GAMMA2 = OperatorHandle("gamma2", gamma2)

_registry: Dict[str, OperatorHandle] = {op.name: op for op in (PHI, GAMMA1, GAMMA2)}


def register_operator(handle: OperatorHandle) -> OperatorHandle:
    """Register a candidate operator so it can be resolved and checked by name."""
    _registry[handle.name] = handle
    return handle


def resolve_operator(name: str) -> OperatorHandle:
    """Look up an operator by name.

    Raises:
        UnknownName: If ``name`` is not registered.
    """
    try:
        return _registry[name]
    except KeyError:
        known = ", ".join(sorted(_registry))
        raise UnknownName(f"Unknown operator {name!r} (known: {known})") from None
