from fractions import Fraction

import pytest

from histclaims.core import rules
from histclaims.core.axioms import AxiomId
from histclaims.core.problems import ClaimsProblem, ValidationError, validate_allocation
from histclaims.core.rules import LevelKind, RuleHandle, TargetUnreachable, UnknownName
from histclaims.core.search import random_historical_problem, search_counterexample

F = Fraction


def test_cap_level_for_equal_awards():
    param = rules.solve_monotone_level(LevelKind.CAP, (0, 0), (3, 6), 5)
    assert param.value == F(5, 2)
    assert param.kind is LevelKind.CAP


def test_cap_level_for_three_agents():
    assert rules.solve_monotone_level("cap", (0, 0, 0), (15, 10, 20), 15).value == 5


def test_loss_level_for_equal_losses():
    assert rules.solve_monotone_level(LevelKind.LOSS, (15, 10, 20), None, 15).value == 10


def test_loss_level_returns_smallest_level_on_flat_piece():
    assert rules.solve_monotone_level(LevelKind.LOSS, (1, 2), None, 0).value == 2


def test_cap_level_returns_smallest_level_on_flat_piece():
    assert rules.solve_monotone_level(LevelKind.CAP, (0, 0), (1, 1), 2).value == 1
    assert rules.solve_monotone_level(LevelKind.CAP, (2, 0), (2, 1), 2).value == 0


def test_solver_rejects_unreachable_targets():
    with pytest.raises(TargetUnreachable, match="outside"):
        rules.solve_monotone_level(LevelKind.CAP, (0, 0), (1, 1), 3)
    with pytest.raises(TargetUnreachable):
        rules.solve_monotone_level(LevelKind.LOSS, (1, 2), None, 4)


@pytest.mark.parametrize(
    "rule, claims, endowment, expected",
    [
        (rules.cel, (15, 10, 20), 15, (5, 0, 10)),
        (rules.cel, (14, 9, 20), 9, (F(3, 2), 0, F(15, 2))),
        (rules.proportional, (12, 9, 12, 8), 9, (F(108, 41), F(81, 41), F(108, 41), F(72, 41))),
        (
            rules.proportional,
            (12, 9, 12),
            F(865, 123),
            (F(3460, 1353), F(865, 451), F(3460, 1353)),
        ),
        (rules.cea, (3, 6), 5, (F(5, 2), F(5, 2))),
        (rules.cea, (3, 6), 7, (3, 4)),
        (rules.talmud, (3, 6), 2, (1, 1)),
        (rules.talmud, (3, 6), 7, (2, 5)),
        (rules.talmud, (3, 6), F(9, 2), (F(3, 2), 3)),
    ],
)
def test_rule_values(rule, claims, endowment, expected):
    assert rule(ClaimsProblem.of(claims, endowment)) == expected


def test_priority_follows_order():
    problem = ClaimsProblem.of((5, 2, 4), 3)

    assert rules.priority((3, 1, 2), problem) == (0, 0, 3)
    assert rules.resolve_rule("priority:3,1,2")(problem) == (0, 0, 3)
    assert rules.priority((1, 2, 3), problem) == (3, 0, 0)


def test_priority_rejects_non_permutation():
    with pytest.raises(ValidationError, match="not a permutation"):
        rules.priority((1, 2), ClaimsProblem.of((5, 2, 4), 3))


def test_conditional_priority_fixture_switches_order():
    dagger = rules.R_DAGGER

    assert dagger(ClaimsProblem.of((5, 2, 4), 3)) == (0, 0, 3)
    assert dagger(ClaimsProblem.of((5, 4, 4), 3)) == (3, 0, 0)
    assert dagger(ClaimsProblem.of((1, 4), 3)) == (1, 2)


def test_resolve_rule_knows_builtins():
    for name in ("prop", "cea", "cel", "talmud", "fixture:r-dagger"):
        assert rules.resolve_rule(name).name == name


@pytest.mark.parametrize("name", ["median", "priority:1,1", "priority:a,b", "priority:0,1"])
def test_resolve_rule_rejects_unknown_names(name):
    with pytest.raises(UnknownName):
        rules.resolve_rule(name)


def test_register_rule_makes_rule_resolvable(monkeypatch):
    monkeypatch.setattr(rules, "_registry", dict(rules._registry))
    handle = RuleHandle("half-cea", rules.cea)

    rules.register_rule(handle)

    assert rules.resolve_rule("half-cea") is handle


def test_register_rule_rejects_priority_prefix(monkeypatch):
    monkeypatch.setattr(rules, "_registry", dict(rules._registry))
    with pytest.raises(ValueError, match="reserved"):
        rules.register_rule(RuleHandle("priority:custom", rules.cea))


def test_builtin_rules_are_bounded_and_balanced(rng, budget):
    for _ in range(budget):
        hp = random_historical_problem(rng, with_history=False)
        for rule in rules.BUILTIN_RULES:
            validate_allocation(hp.problem, rule(hp.problem))


@pytest.mark.parametrize("rule", rules.BUILTIN_RULES, ids=lambda r: r.name)
@pytest.mark.parametrize(
    "axiom",
    [
        AxiomId.EQUAL_TREATMENT,
        AxiomId.ORDER_GAINS,
        AxiomId.ORDER_LOSSES,
        AxiomId.RESOURCE_MONOTONICITY,
        AxiomId.SCALE_INVARIANCE,
    ],
)
def test_builtin_rules_satisfy_standard_axioms(rule, axiom):
    result = search_counterexample(axiom, rule, None, budget=300, seed=11, workers=1)
    assert result.holds, result.witness


def test_kinks_of_builtin_rules():
    agents, claims = (1, 2), (F(3), F(6))

    assert rules.CEA.kinks(agents, claims) == [6, 9]
    assert rules.CEL.kinks(agents, claims) == [3, 0]
    assert sorted(set(rules.TALMUD.kinks(agents, claims))) == [3, F(9, 2), 6]
    assert rules.priority_rule((2, 1)).kinks(agents, claims) == [6, 9]
    assert rules.R_DAGGER.kinks is None


def test_priority_kinks_reject_non_permutation():
    with pytest.raises(ValidationError, match="not a permutation"):
        rules.priority_rule((1, 2, 3)).kinks((1, 2), (F(3), F(6)))


def _dual(problem):
    return ClaimsProblem(problem.agents, problem.claims, problem.total_claims - problem.endowment)


def test_cel_is_the_dual_of_cea(rng, budget):
    for _ in range(budget):
        problem = random_historical_problem(rng, with_history=False).problem
        losses = rules.cea(_dual(problem))
        expected = tuple(c - y for c, y in zip(problem.claims, losses))
        assert rules.cel(problem) == expected, problem


def test_talmud_is_self_dual(rng, budget):
    for _ in range(budget):
        problem = random_historical_problem(rng, with_history=False).problem
        losses = rules.talmud(_dual(problem))
        expected = tuple(c - y for c, y in zip(problem.claims, losses))
        assert rules.talmud(problem) == expected, problem


def _level_map(kind, base, caps, level):
    if kind is LevelKind.CAP:
        return sum((min(c, b + level) for b, c in zip(base, caps)), F(0))
    return sum((max(F(0), b - level) for b in base), F(0))


def _bisect_level(kind, base, caps, target, steps=48):
    # Smallest level reaching the target, to within hi / 2**steps.
    if kind is LevelKind.CAP:
        hi = max([c - b for b, c in zip(base, caps)] + [F(0)])
        reached = lambda value: value >= target
    else:
        hi = max(list(base) + [F(0)])
        reached = lambda value: value <= target
    lo = F(0)
    if reached(_level_map(kind, base, caps, lo)):
        return lo, F(0)
    for _ in range(steps):
        mid = (lo + hi) / 2
        if reached(_level_map(kind, base, caps, mid)):
            hi = mid
        else:
            lo = mid
    return hi, hi - lo


def _random_amounts(rng, n):
    return tuple(F(int(rng.integers(0, 40)), int(rng.integers(1, 7))) for _ in range(n))


@pytest.mark.parametrize("kind", list(LevelKind), ids=lambda k: k.value)
def test_solver_agrees_with_bisection(kind, rng, budget):
    for _ in range(budget):
        n = int(rng.integers(1, 6))
        base = _random_amounts(rng, n)
        caps = _random_amounts(rng, n) if kind is LevelKind.CAP else None
        low = _level_map(kind, base, caps, F(0))
        if kind is LevelKind.CAP:
            low, high = low, sum(caps, F(0))
        else:
            low, high = F(0), low
        target = low + (high - low) * F(int(rng.integers(0, 13)), 12)

        level = rules.solve_monotone_level(kind, base, caps, target).value
        oracle, width = _bisect_level(kind, base, caps, target)

        assert _level_map(kind, base, caps, level) == target
        assert abs(level - oracle) <= width
        if level > 0:
            below = _level_map(kind, base, caps, level - width / 2 - F(1, 10**9))
            assert below < target if kind is LevelKind.CAP else below > target
