from fractions import Fraction

import pytest

from histclaims.core import fixtures
from histclaims.core.axioms import AxiomId
from histclaims.core.fixtures import EXPECTED, FIXTURES, run_published_fixtures


@pytest.fixture(scope="module")
def records():
    return run_published_fixtures()


def test_every_fixture_has_expected_values():
    assert set(FIXTURES) == set(EXPECTED)


def test_all_fixtures_match(records):
    assert [r.name for r in records] == list(FIXTURES)
    for record in records:
        assert record.violation_confirmed, record.name
        assert record.computed == record.expected, record.name
        assert record.match


def test_records_name_the_broken_axiom(records):
    axioms = {r.name: r.axiom for r in records}

    assert axioms["composition-up"] is AxiomId.COMPOSITION_UP
    assert axioms["gamma1-non-arbitrariness"] is AxiomId.NON_ARBITRARINESS
    assert axioms["gamma2-balanced-treatment"] is AxiomId.BALANCED_TREATMENT


def test_perturbed_expectation_is_reported(caplog):
    table = {name: dict(values) for name, values in EXPECTED.items()}
    table["self-duality"]["direct"] = (Fraction(3, 4), Fraction(6, 4))

    with caplog.at_level("WARNING", logger="histclaims"):
        records = run_published_fixtures(table)

    by_name = {r.name: r for r in records}
    assert not by_name["self-duality"].match
    assert by_name["self-duality"].violation_confirmed
    assert all(r.match for r in records if r.name != "self-duality")
    assert "Fixture self-duality mismatch" in caplog.text


def test_missing_expectation_is_a_mismatch():
    table = {name: values for name, values in EXPECTED.items() if name != "consistency"}

    records = {r.name: r for r in run_published_fixtures(table)}

    assert not records["consistency"].match
    assert records["consistency"].expected == {}


def test_patched_table_is_read_at_call_time(monkeypatch):
    monkeypatch.setitem(
        fixtures.EXPECTED, "composition-down", {"direct": (Fraction(1), Fraction(1), Fraction(1))}
    )

    records = {r.name: r for r in run_published_fixtures()}

    assert not records["composition-down"].match
    assert records["composition-up"].match
