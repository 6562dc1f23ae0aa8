"""
Standard Division Rules Module

Proportional, constrained equal awards, constrained equal losses, Talmud and
priority rules on standard claims problems, all backed by one exact solver
for monotone piecewise-linear levels.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .problems import ClaimsProblem, ValidationError, Vector

FIXTURE_RULE_NAME = "fixture:r-dagger"
PRIORITY_PREFIX = "priority:"


class UnknownName(ValueError):
    """A rule, operator, or axiom name is not registered."""


class TargetUnreachable(ValueError):
    """The solver target lies outside the range of the level map."""


class LevelKind(str, Enum):
    CAP = "cap"
    LOSS = "loss"


@dataclass(frozen=True)
class SolveParam:
    """An exact level (the delta, gamma or lambda of a rule) and how it was used."""

    value: Fraction
    kind: LevelKind


KinkFinder = Callable[[Tuple[int, ...], Vector], List[Fraction]]


@dataclass(frozen=True)
class RuleHandle:
    """A named standard rule.

    Attributes:
        name: Registry name, e.g. ``"cea"`` or ``"priority:3,1,2"``.
        evaluate: Maps a valid problem to a bounded, balanced award vector.
        kinks: Optional map from ``(agents, claims)`` to the endowments at
            which the rule's path of awards bends. Exact path tracing needs
            it.
    """

    name: str
    evaluate: Callable[[ClaimsProblem], Vector]
    kinks: Optional[KinkFinder] = None

    def __call__(self, problem: ClaimsProblem) -> Vector:
        return self.evaluate(problem)


def solve_monotone_level(
    kind: LevelKind,
    base: Sequence[Fraction],
    caps: Optional[Sequence[Fraction]],
    target: Fraction,
) -> SolveParam:
    """Solve a monotone piecewise-linear level equation exactly.

    For ``cap`` the map is ``L -> sum(min(caps_i, base_i + L))`` (nondecreasing);
    for ``loss`` it is ``L -> sum(max(0, base_i - L))`` (nonincreasing). Both
    are evaluated over ``L >= 0``. Breakpoints are sorted and the linear
    piece containing ``target`` is solved in closed form. On a flat piece
    the smallest level is returned.

    Args:
        kind: ``LevelKind.CAP`` or ``LevelKind.LOSS``.
        base: Per-agent offsets.
        caps: Per-agent caps (ignored for ``loss``).
        target: Required value of the sum.

    Returns:
        The level as a :class:`SolveParam`.

    Raises:
        TargetUnreachable: If ``target`` is outside the map's range on ``L >= 0``.
    """
    kind = LevelKind(kind)
    target = Fraction(target)
    if kind is LevelKind.CAP:
        if caps is None or len(caps) != len(base):
            raise ValueError("cap levels need one cap per base value")
        return SolveParam(_solve_cap(base, caps, target), kind)
    return SolveParam(_solve_loss(base, target), kind)


def _solve_cap(base: Sequence[Fraction], caps: Sequence[Fraction], target: Fraction) -> Fraction:
    value = sum((min(c, b) for b, c in zip(base, caps)), Fraction(0))
    top = sum(caps, Fraction(0))
    if target < value or target > top:
        raise TargetUnreachable(f"Target {target} outside [{value}, {top}]")
    breakpoints = sorted(c - b for b, c in zip(base, caps) if c > b)
    level = Fraction(0)
    slope = len(breakpoints)
    k = 0
    while k < len(breakpoints):
        point = breakpoints[k]
        reached = value + slope * (point - level)
        if target <= reached:
            return level + (target - value) / slope
        level, value = point, reached
        while k < len(breakpoints) and breakpoints[k] == point:
            slope -= 1
            k += 1
    return level


def _solve_loss(base: Sequence[Fraction], target: Fraction) -> Fraction:
    value = sum((max(Fraction(0), b) for b in base), Fraction(0))
    if target < 0 or target > value:
        raise TargetUnreachable(f"Target {target} outside [0, {value}]")
    breakpoints = sorted(b for b in base if b > 0)
    level = Fraction(0)
    active = len(breakpoints)
    k = 0
    while k < len(breakpoints):
        point = breakpoints[k]
        reached = value - active * (point - level)
        if target >= reached:
            return level + (value - target) / active
        level, value = point, reached
        while k < len(breakpoints) and breakpoints[k] == point:
            active -= 1
            k += 1
    return level


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------


def proportional(problem: ClaimsProblem) -> Vector:
    """Awards proportional to claims: ``c_i * E / C``."""
    total = problem.total_claims
    return tuple(c * problem.endowment / total for c in problem.claims)


def cea(problem: ClaimsProblem) -> Vector:
    """Constrained equal awards: ``min(c_i, delta)``."""
    zeros = (Fraction(0),) * problem.size
    delta = solve_monotone_level(LevelKind.CAP, zeros, problem.claims, problem.endowment)
    return tuple(min(c, delta.value) for c in problem.claims)


def cel(problem: ClaimsProblem) -> Vector:
    """Constrained equal losses: ``max(0, c_i - delta)``."""
    delta = solve_monotone_level(LevelKind.LOSS, problem.claims, None, problem.endowment)
    return tuple(max(Fraction(0), c - delta.value) for c in problem.claims)


def talmud(problem: ClaimsProblem) -> Vector:
    """Talmud rule: CEA on half-claims below C/2, CEL-like above.

    Above the halfway point the losses ``C - E`` are shared as equal-awards
    losses capped at half-claims, i.e. ``c_i - min(c_i / 2, gamma)``.
    """
    halves = tuple(c / 2 for c in problem.claims)
    zeros = (Fraction(0),) * problem.size
    total = problem.total_claims
    if problem.endowment <= total / 2:
        delta = solve_monotone_level(LevelKind.CAP, zeros, halves, problem.endowment)
        return tuple(min(h, delta.value) for h in halves)
    gamma = solve_monotone_level(LevelKind.CAP, zeros, halves, total - problem.endowment)
    return tuple(c - min(h, gamma.value) for c, h in zip(problem.claims, halves))


def _require_permutation(order: Sequence[int], agents: Sequence[int]) -> None:
    if sorted(order) != sorted(agents):
        raise ValidationError(
            f"Priority order {list(order)} is not a permutation of {list(agents)}"
        )


def priority(order: Sequence[int], problem: ClaimsProblem) -> Vector:
    """Fully honor claims one agent at a time, following ``order``.

    Raises:
        ValidationError: If ``order`` is not a permutation of the agents.
    """
    _require_permutation(order, problem.agents)
    awards = [Fraction(0)] * problem.size
    remaining = problem.endowment
    for agent in order:
        k = problem.position(agent)
        awards[k] = min(problem.claims[k], remaining)
        remaining -= awards[k]
    return tuple(awards)


def conditional_priority_fixture(problem: ClaimsProblem) -> Vector:
    """Claims-monotonic priority rule whose historical extension is not.

    On ``N = {1, 2, 3}`` it uses ``1 > 3 > 2`` when both ``c_1`` and ``c_2``
    exceed ``E``, and ``3 > 1 > 2`` otherwise. Any other population uses the
    natural order.
    """
    if set(problem.agents) != {1, 2, 3}:
        return priority(sorted(problem.agents), problem)
    c1 = problem.claims[problem.position(1)]
    c2 = problem.claims[problem.position(2)]
    if c1 > problem.endowment and c2 > problem.endowment:
        return priority((1, 3, 2), problem)
    return priority((3, 1, 2), problem)


# ---------------------------------------------------------------------------
# Path kinks of the built-in rules
# ---------------------------------------------------------------------------


def _no_kinks(agents: Tuple[int, ...], claims: Vector) -> List[Fraction]:
    return []


def _equal_awards_kinks(caps: Vector) -> List[Fraction]:
    return [sum((min(c, level) for c in caps), Fraction(0)) for level in caps]


def _cea_kinks(agents: Tuple[int, ...], claims: Vector) -> List[Fraction]:
    return _equal_awards_kinks(claims)


def _cel_kinks(agents: Tuple[int, ...], claims: Vector) -> List[Fraction]:
    return [
        sum((max(Fraction(0), c - level) for c in claims), Fraction(0))
        for level in claims
    ]


def _talmud_kinks(agents: Tuple[int, ...], claims: Vector) -> List[Fraction]:
    halves = tuple(c / 2 for c in claims)
    total = sum(claims, Fraction(0))
    lower = _equal_awards_kinks(halves)
    return lower + [total - e for e in lower] + [total / 2]


def _priority_kinks(order: Sequence[int]) -> KinkFinder:
    def kinks(agents: Tuple[int, ...], claims: Vector) -> List[Fraction]:
        _require_permutation(order, agents)
        points = []
        running = Fraction(0)
        for agent in order:
            running += claims[agents.index(agent)]
            points.append(running)
        return points

    return kinks


def priority_rule(order: Sequence[int]) -> RuleHandle:
    """Build the handle of the priority rule for ``order``."""
    order = tuple(int(a) for a in order)
    name = PRIORITY_PREFIX + ",".join(str(a) for a in order)
    return RuleHandle(name, lambda p: priority(order, p), _priority_kinks(order))


PROPORTIONAL = RuleHandle("prop", proportional, _no_kinks)
CEA = RuleHandle("cea", cea, _cea_kinks)
CEL = RuleHandle("cel", cel, _cel_kinks)
TALMUD = RuleHandle("talmud", talmud, _talmud_kinks)
R_DAGGER = RuleHandle(FIXTURE_RULE_NAME, conditional_priority_fixture)

BUILTIN_RULES = (PROPORTIONAL, CEA, CEL, TALMUD)

_registry: Dict[str, RuleHandle] = {
    handle.name: handle for handle in BUILTIN_RULES + (R_DAGGER,)
}


def register_rule(handle: RuleHandle) -> RuleHandle:
    """Register a user rule so it can be resolved by name."""
    if handle.name.startswith(PRIORITY_PREFIX):
        raise ValueError(f"Rule names starting with {PRIORITY_PREFIX!r} are reserved")
    _registry[handle.name] = handle
    return handle


def resolve_rule(name: str) -> RuleHandle:
    """Look up a rule by registry name.

    Raises:
        UnknownName: If the name is not registered or a priority order is
            malformed.
    """
    if name.startswith(PRIORITY_PREFIX):
        ids = name[len(PRIORITY_PREFIX):]
        try:
            order = [int(part) for part in ids.split(",")]
        except ValueError:
            raise UnknownName(f"Malformed priority order: {name!r}") from None
        if len(set(order)) != len(order) or any(a <= 0 for a in order):
            raise UnknownName(f"Malformed priority order: {name!r}")
        return priority_rule(order)
    try:
        return _registry[name]
    except KeyError:
        known = ", ".join(sorted(_registry))
        raise UnknownName(f"Unknown rule {name!r} (known: {known}, priority:<ids>)") from None

