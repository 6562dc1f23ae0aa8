"""
Published Counterexample Fixtures

Replays the known instances on which the historical operator breaks claims
monotonicity, composition up, composition down, consistency, population
monotonicity and self-duality, plus the two instances that separate the
operator axioms. Every computed vector is compared exactly against the
``EXPECTED`` table, and the axiom checker must confirm the violation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from .axioms import (
    AxiomId,
    AxiomInstance,
    CheckResult,
    Verdict,
    check_general,
    check_operator_axiom,
)
from .operator import GAMMA1, GAMMA2, PHI, tentative_awards
from .problems import (
    HistoricalProblem,
    Vector,
    restrict,
    to_vector,
    with_claims,
    with_endowment,
)
from .rules import CEL, PROPORTIONAL, R_DAGGER

logger = logging.getLogger("histclaims")


def _log(message, level=logging.INFO):
    """Log a message to the histclaims logger.

    Args:
        message: The message to log.
        level: The log level (logging.DEBUG, logging.INFO, logging.WARNING).
    """
    logger.log(level, str(message))


EXPECTED: Dict[str, Dict[str, Vector]] = {
    "claims-monotonicity": {
        "original": to_vector(["1/2", "1/2", "2"]),
        "raised": to_vector(["3", "0", "0"]),
    },
    "composition-up": {
        "direct": to_vector(["9", "4", "2"]),
        "first": to_vector(["3/2", "3/2", "2"]),
        "second": to_vector(["13/2", "7/2", "0"]),
    },
    "composition-down": {
        "direct": to_vector(["9/2", "5/2", "2"]),
        "two-step": to_vector(["17/4", "11/4", "2"]),
    },
    "consistency": {
        "full": to_vector(["2", "269/123", "350/123", "242/123"]),
        "subgroup-endowment": to_vector(["865/123"]),
        "subgroup": to_vector(["2", "2972/1353", "1279/451"]),
    },
    "population-monotonicity": {
        "original": to_vector(["45/38", "525/38"]),
        "enlarged": to_vector(["2", "12", "1"]),
    },
    "self-duality": {
        "direct": to_vector(["3/4", "5/4"]),
        "mirrored": to_vector(["1/2", "3/2"]),
    },
    "gamma1-non-arbitrariness": {
        "awards": to_vector(["3", "2"]),
        "margins": to_vector(["6/7", "-6/7"]),
    },
    "gamma2-balanced-treatment": {
        "awards": to_vector(["2", "3"]),
        "margins": to_vector(["-1/7", "1/7"]),
    },
}


@dataclass(frozen=True)
class FixtureRecord:
    """Outcome of one fixture.

    Attributes:
        name: Fixture name, a key of ``EXPECTED``.
        axiom: The axiom the instance breaks.
        expected: Expected vectors by label.
        computed: Computed vectors by label.
        violation_confirmed: Whether the axiom checker reports the violation.
        match: Every expected vector equals its computed one and the
            violation is confirmed.
    """

    name: str
    axiom: AxiomId
    expected: Mapping[str, Vector]
    computed: Mapping[str, Vector]
    violation_confirmed: bool
    match: bool


FixtureOutcome = Tuple[AxiomId, Dict[str, Vector], CheckResult]

# Shared by composition up and composition down.
_CEL_HISTORY = [((7, 7, 20), (2, 2, 2))]


def _claims_monotonicity() -> FixtureOutcome:
    hp = HistoricalProblem.of((4, 1, 2), 3, [((3, 3, 3), (2, 2, 1))])
    computed = {
        "original": PHI(R_DAGGER, hp),
        "raised": PHI(R_DAGGER, with_claims(hp, (4, 3, 2))),
    }
    instance = AxiomInstance(hp, claim_increase=(2, Fraction(3)))
    result = check_general(AxiomId.CLAIMS_MONOTONICITY, R_DAGGER, PHI, instance)
    return AxiomId.CLAIMS_MONOTONICITY, computed, result


def _composition_up() -> FixtureOutcome:
    hp = HistoricalProblem.of((10, 5, 2), 15, _CEL_HISTORY)
    first = PHI(CEL, with_endowment(hp, 5))
    leftover = tuple(c - a for c, a in zip(hp.claims, first))
    computed = {
        "direct": PHI(CEL, hp),
        "first": first,
        "second": PHI(CEL, with_endowment(with_claims(hp, leftover), 10)),
    }
    instance = AxiomInstance(hp, endowments=(Fraction(5), Fraction(10)))
    result = check_general(AxiomId.COMPOSITION_UP, CEL, PHI, instance)
    return AxiomId.COMPOSITION_UP, computed, result


def _composition_down() -> FixtureOutcome:
    hp = HistoricalProblem.of((10, 5, 2), 9, _CEL_HISTORY)
    bigger = PHI(CEL, with_endowment(hp, 15))
    computed = {
        "direct": PHI(CEL, hp),
        "two-step": PHI(CEL, with_claims(hp, bigger)),
    }
    instance = AxiomInstance(hp, other_endowment=Fraction(15))
    result = check_general(AxiomId.COMPOSITION_DOWN, CEL, PHI, instance)
    return AxiomId.COMPOSITION_DOWN, computed, result


def _consistency() -> FixtureOutcome:
    hp = HistoricalProblem.of((2, 4, 8, 6), 9, [((12, 7, 6, 4), (2, 2, 2, 2))])
    full = PHI(PROPORTIONAL, hp)
    sub_endowment = sum(full[:3])
    computed = {
        "full": full,
        "subgroup-endowment": (sub_endowment,),
        "subgroup": PHI(PROPORTIONAL, restrict(hp, (1, 2, 3), sub_endowment)),
    }
    instance = AxiomInstance(hp, subgroup=(1, 2, 3))
    result = check_general(AxiomId.CONSISTENCY, PROPORTIONAL, PHI, instance)
    return AxiomId.CONSISTENCY, computed, result


def _population_monotonicity() -> FixtureOutcome:
    hp = HistoricalProblem.of((2, 15), 15, [((2, 20), (1, 0))])
    enlarged = HistoricalProblem.of((2, 15, 1), 15, [((2, 20, 105), (1, 0, 5))])
    computed = {
        "original": PHI(PROPORTIONAL, hp),
        "enlarged": PHI(PROPORTIONAL, enlarged),
    }
    instance = AxiomInstance(hp, enlarged=enlarged)
    result = check_general(AxiomId.POPULATION_MONOTONICITY, PROPORTIONAL, PHI, instance)
    return AxiomId.POPULATION_MONOTONICITY, computed, result


def _self_duality() -> FixtureOutcome:
    hp = HistoricalProblem.of((2, 4), 2, [((2, 2), (1, 1))])
    dual = PHI(PROPORTIONAL, with_endowment(hp, hp.problem.total_claims - hp.endowment))
    computed = {
        "direct": PHI(PROPORTIONAL, hp),
        "mirrored": tuple(c - d for c, d in zip(hp.claims, dual)),
    }
    result = check_general(AxiomId.SELF_DUALITY, PROPORTIONAL, PHI, AxiomInstance(hp))
    return AxiomId.SELF_DUALITY, computed, result


def _operator_fixture(op, axiom: AxiomId) -> Callable[[], FixtureOutcome]:
    def run() -> FixtureOutcome:
        hp = HistoricalProblem.of((3, 4), 5)
        awards = op(PROPORTIONAL, hp)
        tentative = tentative_awards(PROPORTIONAL, hp)
        computed = {
            "awards": awards,
            "margins": tuple(a - t for a, t in zip(awards, tentative)),
        }
        result = check_operator_axiom(axiom, PROPORTIONAL, op, hp)
        return axiom, computed, result

    return run


FIXTURES: Dict[str, Callable[[], FixtureOutcome]] = {
    "claims-monotonicity": _claims_monotonicity,
    "composition-up": _composition_up,
    "composition-down": _composition_down,
    "consistency": _consistency,
    "population-monotonicity": _population_monotonicity,
    "self-duality": _self_duality,
    "gamma1-non-arbitrariness": _operator_fixture(GAMMA1, AxiomId.NON_ARBITRARINESS),
    "gamma2-balanced-treatment": _operator_fixture(GAMMA2, AxiomId.BALANCED_TREATMENT),
}


def run_published_fixtures(
    expected: Optional[Mapping[str, Mapping[str, Vector]]] = None,
) -> List[FixtureRecord]:
    """Replay every fixture and compare it with the expected vectors.

    Mismatches are reported in the records and logged, never raised.

    Args:
        expected: Replacement for ``EXPECTED``; fixtures it omits are
            compared against an empty table and therefore mismatch.

    Returns:
        One record per fixture, in ``FIXTURES`` order.
    """
    table = EXPECTED if expected is None else expected
    records = []
    for name, run in FIXTURES.items():
        axiom, computed, result = run()
        wanted = dict(table.get(name, {}))
        confirmed = result.verdict is Verdict.VIOLATED
        match = confirmed and wanted == computed
        if not match:
            _log(
                f"Fixture {name} mismatch (violation confirmed: {confirmed})",
                logging.WARNING,
            )
        records.append(FixtureRecord(name, axiom, wanted, computed, confirmed, match))
    matched = sum(r.match for r in records)
    _log(f"{matched}/{len(records)} fixtures match")
    return records
