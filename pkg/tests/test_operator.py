from fractions import Fraction

import numpy as np
import pytest

from histclaims.core import operator
from histclaims.core.axioms import AxiomId, check_operator_axiom
from histclaims.core.operator import (
    GAMMA1,
    GAMMA2,
    PHI,
    OperatorHandle,
    Stage,
    WindowViolated,
    apply_historical,
    apply_historical_iterative,
    solve_lambda,
)
from histclaims.core.problems import ClaimsProblem, HistoricalProblem, with_endowment
from histclaims.core.rules import BUILTIN_RULES, CEL, PROPORTIONAL, RuleHandle, UnknownName
from histclaims.core.search import random_historical_problem

F = Fraction


def test_phi_cel_composition_instance(cel_composition_problem):
    solution = apply_historical(CEL, cel_composition_problem)

    assert solution.awards == (9, 4, 2)
    assert solution.lambda_ == 4
    assert solution.tentative == (5, 0, 10)
    assert solution.satiated == frozenset({2})


def test_phi_cel_at_smaller_endowment(cel_composition_problem):
    solution = apply_historical(CEL, with_endowment(cel_composition_problem, 5))

    assert solution.awards == (F(3, 2), F(3, 2), 2)
    assert solution.lambda_ == F(3, 2)


def test_phi_prop_consistency_instance(prop_consistency_problem):
    solution = apply_historical(PROPORTIONAL, prop_consistency_problem)

    assert solution.awards == (2, F(269, 123), F(350, 123), F(242, 123))
    assert solution.lambda_ == F(26, 123)


def test_iterative_procedure_records_stages(cel_composition_problem):
    solution, trace = apply_historical_iterative(CEL, cel_composition_problem)

    assert solution.awards == (9, 4, 2)
    assert solution.lambda_ == 4
    assert trace.stages == (Stage(frozenset({3}), F(8)), Stage(frozenset(), F(0)))
    assert trace.final_set == frozenset({3})


def test_phi_on_empty_history_is_the_rule():
    hp = HistoricalProblem.of((3, 6), 5)

    assert PHI(CEL, hp) == CEL(hp.problem)


def test_phi_reduces_to_the_rule_without_history(rng, budget):
    for _ in range(budget):
        hp = random_historical_problem(rng, with_history=False)
        for rule in BUILTIN_RULES:
            assert PHI(rule, hp) == rule(hp.problem), (rule.name, hp)


def test_awards_never_fall_below_capped_tentative_awards(rng, budget):
    for _ in range(budget):
        hp = random_historical_problem(rng)
        for rule in BUILTIN_RULES:
            solution = apply_historical(rule, hp)
            floor = tuple(min(c, t) for c, t in zip(hp.claims, solution.tentative))
            assert all(a >= f for a, f in zip(solution.awards, floor)), (rule.name, hp)


def test_closed_form_and_iterative_procedure_agree(rng, budget):
    for _ in range(budget):
        hp = random_historical_problem(rng)
        for rule in BUILTIN_RULES:
            closed = apply_historical(rule, hp)
            staged, trace = apply_historical_iterative(rule, hp)
            assert staged.awards == closed.awards, (rule.name, hp)
            assert len(trace.stages) <= hp.size
            assert not trace.stages[-1].members


def test_lambda_balances_and_is_unique_when_claims_exceed_endowment(rng, budget):
    for _ in range(budget):
        hp = random_historical_problem(rng)
        rule = BUILTIN_RULES[int(rng.integers(0, len(BUILTIN_RULES)))]
        solution = apply_historical(rule, hp)
        claims, tentative, lam = hp.claims, solution.tentative, solution.lambda_

        def total(level):
            return sum(min(c, t + level) for c, t in zip(claims, tentative))

        assert sum(solution.awards) == hp.endowment
        assert all(0 <= a <= c for a, c in zip(solution.awards, claims))
        if hp.problem.total_claims == hp.endowment:
            assert solution.awards == claims
            continue
        slack = [c - t - lam for c, t in zip(claims, tentative) if c - t - lam > 0]
        step = min(slack) / 2
        assert total(lam - step) < hp.endowment < total(lam + step)


def test_solve_lambda_rejects_endowment_outside_window():
    with pytest.raises(WindowViolated, match="not balanced"):
        solve_lambda((F(1), F(1)), (F(3), F(0)), F(1, 2))


def test_unbalanced_rule_is_reported():
    greedy = RuleHandle("greedy", lambda p: p.claims)
    hp = HistoricalProblem.of((3, 4), 5, [((2, 2), (1, 0))])

    with pytest.raises(WindowViolated):
        apply_historical(greedy, hp)
    with pytest.raises(WindowViolated):
        apply_historical_iterative(greedy, HistoricalProblem.of((3, 4), 5))


def _branch_margins(hp):
    # Proportional tentative awards and the two branch allocations, from their closed forms.
    claims, endowment = hp.claims, hp.endowment
    total = sum(claims)
    tentative = tuple(c * endowment / total for c in claims)
    first = (claims[0], endowment - claims[0])
    loss = (total - endowment) / 2
    equal_losses = tuple(c - loss for c in claims)
    return (
        first,
        equal_losses,
        tuple(a - t for a, t in zip(first, tentative)),
        tuple(a - t for a, t in zip(equal_losses, tentative)),
    )


def test_gamma_operators_on_their_branch(independence_problem):
    first, equal_losses, first_margins, loss_margins = _branch_margins(independence_problem)

    assert GAMMA1(PROPORTIONAL, independence_problem) == first == (3, 2)
    assert GAMMA2(PROPORTIONAL, independence_problem) == equal_losses == (2, 3)
    assert first_margins == (F(6, 7), F(-6, 7))
    assert loss_margins == (F(-1, 7), F(1, 7))


def test_gamma_operators_match_branch_formulas(rng, budget):
    for _ in range(budget):
        hp = _branch_problem(rng)
        first, equal_losses, _, _ = _branch_margins(hp)
        assert GAMMA1(PROPORTIONAL, hp) == first, hp
        assert GAMMA2(PROPORTIONAL, hp) == equal_losses, hp


def test_gamma_operators_fall_back_to_phi(cel_composition_problem):
    two_agents = HistoricalProblem.of((3, 4), 3)

    for hp in (cel_composition_problem, two_agents):
        expected = PHI(CEL, hp)
        assert GAMMA1(CEL, hp) == expected
        assert GAMMA2(CEL, hp) == expected


def _branch_problem(rng) -> HistoricalProblem:
    claims = tuple(F(int(rng.integers(1, 25)), int(rng.integers(1, 5))) for _ in range(2))
    top, total = max(claims), sum(claims)
    endowment = top + (total - top) * int(rng.integers(1, 25)) / 24
    return HistoricalProblem(ClaimsProblem((1, 2), claims, endowment))


@pytest.mark.parametrize(
    "op, holding, failing",
    [
        (GAMMA1, AxiomId.BALANCED_TREATMENT, AxiomId.NON_ARBITRARINESS),
        (GAMMA2, AxiomId.NON_ARBITRARINESS, AxiomId.BALANCED_TREATMENT),
    ],
    ids=["gamma1", "gamma2"],
)
def test_gamma_operators_separate_operator_axioms(op, holding, failing, independence_problem):
    rng = np.random.default_rng(7)
    for _ in range(200):
        hp = _branch_problem(rng)
        assert check_operator_axiom(holding, PROPORTIONAL, op, hp).holds
    assert not check_operator_axiom(failing, PROPORTIONAL, op, independence_problem).holds


def test_resolve_operator():
    assert operator.resolve_operator("phi") is PHI
    assert operator.resolve_operator("gamma2") is GAMMA2
    with pytest.raises(UnknownName, match="known"):
        operator.resolve_operator("psi")


def test_register_operator(monkeypatch):
    monkeypatch.setattr(operator, "_registry", dict(operator._registry))
    identity = OperatorHandle("tentative", operator.tentative_awards)

    operator.register_operator(identity)

    assert operator.resolve_operator("tentative") is identity
