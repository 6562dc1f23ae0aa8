"""
Axiom Catalog Module

Exact, single-instance checkers for the standard axioms, their general
(historical) versions, and the operator-level axioms that characterize the
historical operator. Universal quantification is left to the search harness
in :mod:`histclaims.core.search`; a checker only ever judges the instance it
is given.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Dict, Optional, Tuple

from .operator import OperatorHandle, tentative_awards
from .problems import (
    HistoricalProblem,
    Vector,
    aggregates,
    permute,
    restrict,
    scale,
    validate_historical,
    validate_problem,
    with_claims,
    with_endowment,
)
from .rules import RuleHandle, UnknownName

CONTINUITY_STEPS = 20

GeneralRule = Callable[[HistoricalProblem], Vector]


class SignatureMismatch(ValueError):
    """The instance lacks a field the axiom needs, or the fields are inconsistent."""


class AxiomId(str, Enum):
    EQUAL_TREATMENT = "equal-treatment"
    ORDER_GAINS = "order-gains"
    ORDER_LOSSES = "order-losses"
    ANONYMITY = "anonymity"
    SCALE_INVARIANCE = "scale-invariance"
    CONTINUITY_SAMPLED = "continuity-sampled"
    SELF_DUALITY = "self-duality"
    SECUREMENT = "securement"
    COMPOSITION_UP = "composition-up"
    COMPOSITION_DOWN = "composition-down"
    RESOURCE_MONOTONICITY = "resource-monotonicity"
    CLAIMS_MONOTONICITY = "claims-monotonicity"
    POPULATION_MONOTONICITY = "population-monotonicity"
    CONSISTENCY = "consistency"
    PRESENT_BOUNDEDNESS = "present-boundedness"
    BALANCED_TREATMENT = "balanced-treatment"
    NON_ARBITRARINESS = "non-arbitrariness"


class Verdict(str, Enum):
    HOLDS = "holds"
    VIOLATED = "violated"


class Scope(str, Enum):
    STANDARD = "standard"
    GENERAL = "general"
    OPERATOR = "operator"


OPERATOR_AXIOMS = frozenset(
    {
        AxiomId.PRESENT_BOUNDEDNESS,
        AxiomId.BALANCED_TREATMENT,
        AxiomId.NON_ARBITRARINESS,
    }
)

SIGNATURES: Dict[AxiomId, Tuple[str, ...]] = {
    AxiomId.EQUAL_TREATMENT: ("problem",),
    AxiomId.ORDER_GAINS: ("problem",),
    AxiomId.ORDER_LOSSES: ("problem",),
    AxiomId.ANONYMITY: ("problem", "permutation"),
    AxiomId.SCALE_INVARIANCE: ("problem", "scale"),
    AxiomId.CONTINUITY_SAMPLED: ("problem",),
    AxiomId.SELF_DUALITY: ("problem",),
    AxiomId.SECUREMENT: ("problem",),
    AxiomId.COMPOSITION_UP: ("problem", "endowments"),
    AxiomId.COMPOSITION_DOWN: ("problem", "other_endowment"),
    AxiomId.RESOURCE_MONOTONICITY: ("problem", "other_endowment"),
    AxiomId.CLAIMS_MONOTONICITY: ("problem", "claim_increase"),
    AxiomId.POPULATION_MONOTONICITY: ("problem", "enlarged"),
    AxiomId.CONSISTENCY: ("problem", "subgroup"),
    AxiomId.PRESENT_BOUNDEDNESS: ("problem",),
    AxiomId.BALANCED_TREATMENT: ("problem",),
    AxiomId.NON_ARBITRARINESS: ("problem",),
}


@dataclass(frozen=True)
class AxiomInstance:
    """Inputs of one axiom check; only the fields in the axiom's signature are read."""

    problem: HistoricalProblem
    endowments: Optional[Tuple[Fraction, Fraction]] = None
    other_endowment: Optional[Fraction] = None
    subgroup: Optional[Tuple[int, ...]] = None
    permutation: Optional[Tuple[int, ...]] = None
    scale: Optional[Fraction] = None
    claim_increase: Optional[Tuple[int, Fraction]] = None
    enlarged: Optional[HistoricalProblem] = None


@dataclass(frozen=True)
class Witness:
    """Both sides of a violated (in)equality, with the agents it fails at."""

    instance: AxiomInstance
    relation: str
    agents: Tuple[int, ...]
    lhs: Vector
    rhs: Vector


@dataclass(frozen=True)
class CheckResult:
    axiom: AxiomId
    verdict: Verdict
    witness: Optional[Witness] = None
    scope: Scope = Scope.GENERAL
    trials: int = 1

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS


def resolve_axiom(name: str) -> AxiomId:
    try:
        return AxiomId(name)
    except ValueError:
        known = ", ".join(a.value for a in AxiomId)
        raise UnknownName(f"Unknown axiom {name!r} (known: {known})") from None


def _require(axiom: AxiomId, instance: AxiomInstance) -> None:
    missing = [f for f in SIGNATURES[axiom] if getattr(instance, f) is None]
    if missing:
        raise SignatureMismatch(
            f"{axiom.value} needs {', '.join(missing)} in the instance"
        )


# ---------------------------------------------------------------------------
# Individual checkers: each returns a Witness when the axiom fails
# ---------------------------------------------------------------------------


def _standing(hp: HistoricalProblem):
    agg = aggregates(hp)
    return [
        (hp.claims[i], agg.delta_claims[i], agg.delta_awards[i]) for i in range(hp.size)
    ]


def _dominates(first, second) -> bool:
    return first[0] >= second[0] and first[1] >= second[1] and first[2] <= second[2]


def _check_equal_treatment(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    standing = _standing(hp)
    awards = solve(hp)
    for i, j in combinations(range(hp.size), 2):
        if standing[i] == standing[j] and awards[i] != awards[j]:
            return Witness(
                inst, "S_i == S_j", (hp.agents[i], hp.agents[j]), (awards[i],), (awards[j],)
            )
    return None


def _check_order_gains(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    standing = _standing(hp)
    awards = solve(hp)
    for i, j in permutations(range(hp.size), 2):
        if _dominates(standing[i], standing[j]) and awards[i] < awards[j]:
            return Witness(
                inst, "S_i >= S_j", (hp.agents[i], hp.agents[j]), (awards[i],), (awards[j],)
            )
    return None


def _check_order_losses(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    standing = _standing(hp)
    awards = solve(hp)
    losses = [c - a for c, a in zip(hp.claims, awards)]
    for i, j in permutations(range(hp.size), 2):
        if _dominates(standing[i], standing[j]) and losses[i] < losses[j]:
            return Witness(
                inst,
                "c_i - S_i >= c_j - S_j",
                (hp.agents[i], hp.agents[j]),
                (losses[i],),
                (losses[j],),
            )
    return None


def _check_anonymity(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    moved = permute(hp, inst.permutation)
    original = solve(hp)
    shuffled = solve(moved)
    pulled_back = tuple(shuffled[hp.agents.index(agent)] for agent in inst.permutation)
    if pulled_back != original:
        bad = tuple(
            hp.agents[k] for k in range(hp.size) if pulled_back[k] != original[k]
        )
        return Witness(inst, "S_pi(i)(pi h) == S_i(h)", bad, pulled_back, original)
    return None


def _check_scale_invariance(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    rho = inst.scale
    if rho <= 0:
        raise SignatureMismatch(f"scale must be positive, got {rho}")
    hp = inst.problem
    scaled = solve(scale(hp, rho))
    expected = tuple(rho * a for a in solve(hp))
    if scaled != expected:
        return Witness(inst, "S(rho c, rho E, rho h) == rho S(c, E, h)", hp.agents, scaled, expected)
    return None


def _gap(first: Vector, second: Vector) -> Fraction:
    return max((abs(a - b) for a, b in zip(first, second)), default=Fraction(0))


def _check_continuity(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    limit = solve(hp)
    sequences = []
    if hp.endowment > 0:
        sequences.append(
            lambda eps: with_endowment(hp, hp.endowment * (1 - eps))
        )
    sequences.append(
        lambda eps: with_endowment(
            with_claims(hp, tuple(c + eps for c in hp.claims)), hp.endowment + eps
        )
    )
    for build in sequences:
        gaps = []
        last = limit
        for k in range(1, CONTINUITY_STEPS + 1):
            last = solve(build(Fraction(1, 2**k)))
            gaps.append(_gap(last, limit))
        final = gaps[-1]
        if final != 0 and final * 2 ** (CONTINUITY_STEPS // 2) > max(gaps):
            return Witness(inst, "S(p_k) -> S(p)", hp.agents, last, limit)
    return None


def _check_self_duality(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    total = hp.problem.total_claims
    awards = solve(hp)
    dual = solve(with_endowment(hp, total - hp.endowment))
    mirrored = tuple(c - d for c, d in zip(hp.claims, dual))
    if awards != mirrored:
        return Witness(inst, "S(c, E, h) == c - S(c, C - E, h)", hp.agents, awards, mirrored)
    return None


def _check_securement(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    awards = solve(hp)
    bounds = tuple(min(c, hp.endowment) / hp.size for c in hp.claims)
    bad = tuple(hp.agents[k] for k in range(hp.size) if awards[k] < bounds[k])
    if bad:
        return Witness(inst, "S_i >= min(c_i, E) / n", bad, awards, bounds)
    return None


def _check_composition_up(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    first_part, second_part = inst.endowments
    if first_part <= 0 or second_part <= 0 or first_part + second_part != hp.endowment:
        raise SignatureMismatch(
            f"composition-up needs E1, E2 > 0 with E1 + E2 = {hp.endowment}"
        )
    direct = solve(hp)
    first = solve(with_endowment(hp, first_part))
    leftover = tuple(c - a for c, a in zip(hp.claims, first))
    second = solve(with_endowment(with_claims(hp, leftover), second_part))
    combined = tuple(a + b for a, b in zip(first, second))
    if direct != combined:
        return Witness(
            inst, "S(c, E, h) == S(c, E1, h) + S(c - S(c, E1, h), E2, h)", hp.agents, direct, combined
        )
    return None


def _larger_endowment(hp: HistoricalProblem, inst: AxiomInstance) -> Fraction:
    larger = inst.other_endowment
    if not hp.endowment <= larger <= hp.problem.total_claims:
        raise SignatureMismatch(
            f"E' must satisfy {hp.endowment} <= E' <= {hp.problem.total_claims}, got {larger}"
        )
    return larger


def _check_composition_down(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    larger = _larger_endowment(hp, inst)
    direct = solve(hp)
    bigger = solve(with_endowment(hp, larger))
    two_step = solve(with_claims(hp, bigger))
    if direct != two_step:
        return Witness(inst, "S(c, E, h) == S(S(c, E', h), E, h)", hp.agents, direct, two_step)
    return None


def _check_resource_monotonicity(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    larger = _larger_endowment(hp, inst)
    before = solve(hp)
    after = solve(with_endowment(hp, larger))
    bad = tuple(hp.agents[k] for k in range(hp.size) if before[k] > after[k])
    if bad:
        return Witness(inst, "S(c, E, h) <= S(c, E', h)", bad, before, after)
    return None


def _check_claims_monotonicity(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    agent, new_claim = inst.claim_increase
    k = hp.problem.position(agent)
    if new_claim <= hp.claims[k]:
        raise SignatureMismatch(
            f"claim_increase must raise agent {agent}'s claim above {hp.claims[k]}"
        )
    raised = list(hp.claims)
    raised[k] = new_claim
    before = solve(hp)
    after = solve(with_claims(hp, raised))
    if after[k] < before[k]:
        return Witness(inst, "S_i(c'_i, c_-i) >= S_i(c)", (agent,), (after[k],), (before[k],))
    return None


def _check_population_monotonicity(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    big = inst.enlarged
    if big.endowment != hp.endowment or not set(hp.agents) < set(big.agents):
        raise SignatureMismatch(
            "enlarged problem must add agents and keep the endowment"
        )
    common = restrict(big, hp.agents, hp.endowment)
    if common.claims != hp.claims or common.history != hp.history:
        raise SignatureMismatch(
            "enlarged problem must agree with the original on its agents"
        )
    small_awards = solve(hp)
    big_awards = solve(big)
    restricted = tuple(big_awards[big.agents.index(agent)] for agent in hp.agents)
    bad = tuple(
        hp.agents[k] for k in range(hp.size) if restricted[k] > small_awards[k]
    )
    if bad:
        return Witness(inst, "S_i(N', c', E, h') <= S_i(N, c, E, h)", bad, restricted, small_awards)
    return None


def _check_consistency(solve: GeneralRule, inst: AxiomInstance) -> Optional[Witness]:
    hp = inst.problem
    members = tuple(inst.subgroup)
    if not members or not set(members) < set(hp.agents):
        raise SignatureMismatch("subgroup must be a nonempty proper subset of the agents")
    positions = [k for k, agent in enumerate(hp.agents) if agent in set(members)]
    awards = solve(hp)
    if sum((hp.claims[k] for k in positions), Fraction(0)) == 0:
        return None
    sub_endowment = sum((awards[k] for k in positions), Fraction(0))
    sub = restrict(hp, members, sub_endowment)
    sub_awards = solve(sub)
    expected = tuple(awards[k] for k in positions)
    if sub_awards != expected:
        bad = tuple(
            sub.agents[k] for k in range(sub.size) if sub_awards[k] != expected[k]
        )
        return Witness(inst, "S_i(M, c_M, E_M, h_M) == S_i(N, c, E, h)", bad, sub_awards, expected)
    return None


_CHECKERS: Dict[AxiomId, Callable[[GeneralRule, AxiomInstance], Optional[Witness]]] = {
    AxiomId.EQUAL_TREATMENT: _check_equal_treatment,
    AxiomId.ORDER_GAINS: _check_order_gains,
    AxiomId.ORDER_LOSSES: _check_order_losses,
    AxiomId.ANONYMITY: _check_anonymity,
    AxiomId.SCALE_INVARIANCE: _check_scale_invariance,
    AxiomId.CONTINUITY_SAMPLED: _check_continuity,
    AxiomId.SELF_DUALITY: _check_self_duality,
    AxiomId.SECUREMENT: _check_securement,
    AxiomId.COMPOSITION_UP: _check_composition_up,
    AxiomId.COMPOSITION_DOWN: _check_composition_down,
    AxiomId.RESOURCE_MONOTONICITY: _check_resource_monotonicity,
    AxiomId.CLAIMS_MONOTONICITY: _check_claims_monotonicity,
    AxiomId.POPULATION_MONOTONICITY: _check_population_monotonicity,
    AxiomId.CONSISTENCY: _check_consistency,
}


def _result(axiom: AxiomId, witness: Optional[Witness], scope: Scope) -> CheckResult:
    verdict = Verdict.HOLDS if witness is None else Verdict.VIOLATED
    return CheckResult(axiom, verdict, witness, scope)


def _check_with(
    axiom: AxiomId, solve: GeneralRule, instance: AxiomInstance, scope: Scope
) -> CheckResult:
    axiom = AxiomId(axiom)
    if axiom in OPERATOR_AXIOMS:
        raise SignatureMismatch(
            f"{axiom.value} is an operator axiom; use check_operator_axiom"
        )
    _require(axiom, instance)
    validate_historical(instance.problem)
    return _result(axiom, _CHECKERS[axiom](solve, instance), scope)


def standard_solver(rule: RuleHandle) -> GeneralRule:
    """View a standard rule as a general rule on empty histories."""

    def solve(hp: HistoricalProblem) -> Vector:
        validate_problem(hp.problem)
        return rule(hp.problem)

    return solve


def general_solver(rule: RuleHandle, op: OperatorHandle) -> GeneralRule:
    return lambda hp: op(rule, hp)


def check_standard(axiom: AxiomId, rule: RuleHandle, instance: AxiomInstance) -> CheckResult:
    """Check a standard axiom for ``rule`` on one instance.

    Standard axioms are the general ones read on empty histories, so the
    instance's problems must carry no history.

    Raises:
        SignatureMismatch: If a required field is missing, a history is
            present, or the axiom is operator-level.
    """
    problems = [instance.problem] + ([instance.enlarged] if instance.enlarged else [])
    if any(len(p.history) for p in problems):
        raise SignatureMismatch("standard axioms are checked on problems without history")
    return _check_with(axiom, standard_solver(rule), instance, Scope.STANDARD)


def check_general(
    axiom: AxiomId, rule: RuleHandle, op: OperatorHandle, instance: AxiomInstance
) -> CheckResult:
    """Check the general version of an axiom for the rule ``op(rule)``."""
    return _check_with(axiom, general_solver(rule, op), instance, Scope.GENERAL)


def check_operator_axiom(
    axiom: AxiomId, rule: RuleHandle, op: OperatorHandle, hp: HistoricalProblem
) -> CheckResult:
    """Check present boundedness, balanced treatment, or non-arbitrariness.

    Margins are ``award_i - R_i(N, c~, E)``. Balanced treatment requires
    equal margins across rationed agents (``award < claim``);
    non-arbitrariness requires every fully honored agent with
    ``R_i(N, c~, E) < c_i`` to have a margin no larger than any rationed
    agent's.
    """
    axiom = AxiomId(axiom)
    if axiom not in OPERATOR_AXIOMS:
        raise SignatureMismatch(f"{axiom.value} is not an operator axiom")
    validate_historical(hp)
    instance = AxiomInstance(problem=hp)
    tentative = tentative_awards(rule, hp)
    awards = op(rule, hp)
    claims = hp.claims
    margins = tuple(a - t for a, t in zip(awards, tentative))
    rationed = [k for k in range(hp.size) if awards[k] < claims[k]]
    witness = None

    if axiom is AxiomId.PRESENT_BOUNDEDNESS:
        for k in range(hp.size):
            if tentative[k] >= claims[k] and awards[k] != claims[k]:
                witness = Witness(
                    instance, "R_i(c~) >= c_i implies award_i == c_i",
                    (hp.agents[k],), (awards[k],), (claims[k],),
                )
                break
    elif axiom is AxiomId.BALANCED_TREATMENT:
        for i, j in combinations(rationed, 2):
            if margins[i] != margins[j]:
                witness = Witness(
                    instance, "award_i - R_i(c~) == award_j - R_j(c~)",
                    (hp.agents[i], hp.agents[j]), (margins[i],), (margins[j],),
                )
                break
    else:
        honored = [
            k for k in range(hp.size) if awards[k] == claims[k] and tentative[k] < claims[k]
        ]
        for i in honored:
            for j in rationed:
                if margins[i] > margins[j]:
                    witness = Witness(
                        instance, "award_i - R_i(c~) <= award_j - R_j(c~)",
                        (hp.agents[i], hp.agents[j]), (margins[i],), (margins[j],),
                    )
                    break
            if witness is not None:
                break
    return _result(axiom, witness, Scope.OPERATOR)


def check(
    axiom: AxiomId,
    rule: RuleHandle,
    op: Optional[OperatorHandle],
    instance: AxiomInstance,
) -> CheckResult:
    """Dispatch to the standard, general, or operator checker.

    ``op=None`` selects the standard axiom.
    """
    axiom = AxiomId(axiom)
    if axiom in OPERATOR_AXIOMS:
        if op is None:
            raise SignatureMismatch(f"{axiom.value} needs an operator")
        return check_operator_axiom(axiom, rule, op, instance.problem)
    if op is None:
        return check_standard(axiom, rule, instance)
    return check_general(axiom, rule, op, instance)


def replay(
    result: CheckResult, rule: RuleHandle, op: Optional[OperatorHandle] = None
) -> CheckResult:
    """Re-run the checker on a violation's witness."""
    if result.witness is None:
        raise ValueError("Only violated results carry a witness to replay")
    instance = result.witness.instance
    if result.scope is Scope.STANDARD:
        return check_standard(result.axiom, rule, instance)
    if op is None:
        raise SignatureMismatch(f"Replaying a {result.scope.value} result needs an operator")
    if result.scope is Scope.OPERATOR:
        return check_operator_axiom(result.axiom, rule, op, instance.problem)
    return check_general(result.axiom, rule, op, instance)
