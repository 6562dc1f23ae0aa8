import numpy as np
import pytest

from histclaims.core import search
from histclaims.core.axioms import SIGNATURES, AxiomId, SignatureMismatch, Verdict, replay
from histclaims.core.operator import PHI
from histclaims.core.problems import validate_historical
from histclaims.core.rules import BUILTIN_RULES, CEA, CEL, PROPORTIONAL, TALMUD

PRESERVED = [
    AxiomId.ANONYMITY,
    AxiomId.EQUAL_TREATMENT,
    AxiomId.ORDER_GAINS,
    AxiomId.SCALE_INVARIANCE,
    AxiomId.RESOURCE_MONOTONICITY,
]


def test_get_default_workers_reads_environment(monkeypatch):
    monkeypatch.delenv("HISTCLAIMS_WORKERS", raising=False)
    assert search.get_default_workers() == 1

    monkeypatch.setenv("HISTCLAIMS_WORKERS", "3")
    assert search.get_default_workers() == 3

    monkeypatch.setenv("HISTCLAIMS_WORKERS", "many")
    assert search.get_default_workers() == 1


def test_random_problems_are_valid_and_within_limits(rng):
    sizes = set()
    for _ in range(500):
        hp = search.random_historical_problem(rng)
        validate_historical(hp)
        sizes.add(hp.size)
        assert len(hp.history) <= search.MAX_HISTORY
        assert all(c.denominator <= search.MAX_DENOMINATOR for c in hp.claims)
    assert sizes == set(range(search.MIN_AGENTS, search.MAX_AGENTS + 1))


def test_random_problems_without_history(rng):
    for _ in range(50):
        assert len(search.random_historical_problem(rng, with_history=False).history) == 0


@pytest.mark.parametrize("axiom", list(AxiomId), ids=lambda a: a.value)
def test_random_instances_carry_their_signature(axiom):
    rng = np.random.default_rng(5)
    for _ in range(20):
        instance = search.random_instance(axiom, rng)
        for field in SIGNATURES[axiom]:
            assert getattr(instance, field) is not None
        validate_historical(instance.problem)
        if instance.enlarged is not None:
            validate_historical(instance.enlarged)


def test_search_is_deterministic():
    first = search.search_counterexample(
        AxiomId.SELF_DUALITY, PROPORTIONAL, PHI, budget=300, seed=42, workers=1
    )
    second = search.search_counterexample(
        AxiomId.SELF_DUALITY, PROPORTIONAL, PHI, budget=300, seed=42, workers=1
    )

    assert first == second
    assert first.verdict is Verdict.VIOLATED
    assert 1 <= first.trials <= 300


def test_sharded_search_reports_lowest_trial():
    serial = search.search_counterexample(
        AxiomId.CONSISTENCY, PROPORTIONAL, PHI, budget=200, seed=9, workers=1
    )
    sharded = search.search_counterexample(
        AxiomId.CONSISTENCY, PROPORTIONAL, PHI, budget=200, seed=9, workers=2
    )

    assert sharded == serial


def test_search_logs_violation(caplog):
    with caplog.at_level("WARNING", logger="histclaims"):
        search.search_counterexample(
            AxiomId.SELF_DUALITY, PROPORTIONAL, PHI, budget=300, seed=1, workers=1
        )
    assert "Violation of self-duality" in caplog.text


def test_search_rejects_bad_arguments():
    with pytest.raises(ValueError, match="budget"):
        search.search_counterexample(AxiomId.SECUREMENT, CEA, PHI, budget=0)
    with pytest.raises(SignatureMismatch):
        search.search_counterexample(AxiomId.NON_ARBITRARINESS, CEA, None, budget=10)


def test_holds_result_reports_budget():
    result = search.search_counterexample(
        AxiomId.EQUAL_TREATMENT, CEA, PHI, budget=50, seed=0, workers=1
    )
    assert result.holds
    assert result.trials == 50
    assert result.witness is None


@pytest.mark.parametrize("rule", BUILTIN_RULES, ids=lambda r: r.name)
@pytest.mark.parametrize("axiom", PRESERVED, ids=lambda a: a.value)
def test_phi_preserves_axioms(rule, axiom, budget):
    result = search.search_counterexample(axiom, rule, PHI, budget=budget, seed=2024)
    assert result.holds, result.witness


@pytest.mark.parametrize("rule", [CEA, TALMUD], ids=lambda r: r.name)
def test_phi_preserves_securement(rule, budget):
    result = search.search_counterexample(
        AxiomId.SECUREMENT, rule, PHI, budget=budget, seed=2024
    )
    assert result.holds, result.witness


@pytest.mark.parametrize("rule", [PROPORTIONAL, CEL], ids=lambda r: r.name)
def test_prop_and_cel_lack_securement(rule):
    result = search.search_counterexample(
        AxiomId.SECUREMENT, rule, None, budget=2000, seed=2024, workers=1
    )
    assert not result.holds
    assert replay(result, rule).witness == result.witness


def test_phi_cea_preserves_order_in_losses(budget):
    result = search.search_counterexample(
        AxiomId.ORDER_LOSSES, CEA, PHI, budget=budget, seed=2024
    )
    assert result.holds, result.witness


@pytest.mark.parametrize("rule", BUILTIN_RULES, ids=lambda r: r.name)
@pytest.mark.parametrize(
    "axiom",
    [AxiomId.PRESENT_BOUNDEDNESS, AxiomId.BALANCED_TREATMENT, AxiomId.NON_ARBITRARINESS],
    ids=lambda a: a.value,
)
def test_phi_satisfies_operator_axioms(rule, axiom, budget):
    result = search.search_counterexample(axiom, rule, PHI, budget=budget, seed=77)
    assert result.holds, result.witness


def test_self_duality_counterexample_is_found():
    result = search.search_counterexample(
        AxiomId.SELF_DUALITY, PROPORTIONAL, PHI, budget=2000, seed=0, workers=1
    )

    assert not result.holds
    assert replay(result, PROPORTIONAL, PHI).verdict is Verdict.VIOLATED
