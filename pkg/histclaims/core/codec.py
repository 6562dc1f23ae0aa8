"""
Text Codec Module

Converts problems, axiom instances, results, fixture reports and paths to and
from JSON and CSV. Amounts always cross this boundary as ``"p"`` or ``"p/q"``
strings; JSON floats are rejected.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional

from .axioms import AxiomInstance, CheckResult, Witness
from .fixtures import FixtureRecord
from .operator import HistoricalSolution, IterativeTrace
from .paths import AwardPath
from .problems import (
    ClaimsProblem,
    HistoricalProblem,
    History,
    PeriodRecord,
    Vector,
    parse_amount,
)


class ParseError(ValueError):
    """Input text is not valid JSON or does not follow the expected schema."""


def _reject_float(text: str):
    raise ParseError(f"Floats are not accepted, got {text}; use a 'p/q' string")


def loads(data) -> Any:
    """Parse JSON bytes or text, refusing floating-point numbers."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"Input is not UTF-8: {exc}") from None
    try:
        return json.loads(data, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"Malformed JSON: {exc}") from None


def dumps(payload: Any) -> bytes:
    return (json.dumps(payload, indent=2) + "\n").encode("utf-8")


def format_amount(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_amount_text(value: Any) -> Fraction:
    """Parse one JSON amount (a string or an integer)."""
    try:
        return parse_amount(value)
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from None


def format_vector(values: Iterable[Fraction]) -> List[str]:
    return [format_amount(v) for v in values]


def _parse_vector(values: Any, field: str) -> Vector:
    if not isinstance(values, list):
        raise ParseError(f"Field {field!r} must be a list of amounts")
    return tuple(parse_amount_text(v) for v in values)


def _field(obj: Mapping, name: str) -> Any:
    try:
        return obj[name]
    except KeyError:
        raise ParseError(f"Missing field {name!r}") from None


def _int(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"Field {field!r} must be an integer")
    return value


def _int_list(values: Any, field: str) -> tuple:
    if not isinstance(values, list):
        raise ParseError(f"Field {field!r} must be a list of agent ids")
    return tuple(_int(v, field) for v in values)


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------


def problem_from_json(obj: Any) -> HistoricalProblem:
    """Read a ClaimsProblem or HistoricalProblem JSON object.

    ``agents`` defaults to ``1..n`` and ``history`` to empty. The result is
    not validated here.
    """
    if not isinstance(obj, dict):
        raise ParseError("A problem must be a JSON object")
    claims = _parse_vector(_field(obj, "claims"), "claims")
    endowment = parse_amount_text(_field(obj, "endowment"))
    agents = obj.get("agents")
    agents = _int_list(agents, "agents") if agents is not None else None
    periods = []
    history = obj.get("history", [])
    if not isinstance(history, list):
        raise ParseError("Field 'history' must be a list of periods")
    for period in history:
        if not isinstance(period, dict):
            raise ParseError("Each history period must be a JSON object")
        periods.append(
            PeriodRecord(
                _parse_vector(_field(period, "claims"), "history.claims"),
                _parse_vector(_field(period, "allocations"), "history.allocations"),
            )
        )
    problem = ClaimsProblem.of(claims, endowment, agents)
    return HistoricalProblem(problem, History(tuple(periods)))


def problem_to_json(hp: HistoricalProblem) -> Dict[str, Any]:
    return {
        "agents": list(hp.agents),
        "claims": format_vector(hp.claims),
        "endowment": format_amount(hp.endowment),
        "history": [
            {"claims": format_vector(p.claims), "allocations": format_vector(p.allocations)}
            for p in hp.history.periods
        ],
    }


def instance_from_json(obj: Any) -> AxiomInstance:
    """Read an axiom-check input: a problem plus the axiom-specific fields."""
    hp = problem_from_json(obj)
    endowments = None
    if "E1" in obj or "E2" in obj:
        endowments = (
            parse_amount_text(_field(obj, "E1")),
            parse_amount_text(_field(obj, "E2")),
        )
    other = obj.get("E_prime")
    increase = obj.get("claim_increase")
    if increase is not None:
        if not isinstance(increase, dict):
            raise ParseError("Field 'claim_increase' must be an object")
        increase = (
            _int(_field(increase, "agent"), "claim_increase.agent"),
            parse_amount_text(_field(increase, "new_claim")),
        )
    subgroup = obj.get("subgroup")
    permutation = obj.get("permutation")
    scale = obj.get("scaled_by")
    enlarged = obj.get("enlarged")
    return AxiomInstance(
        problem=hp,
        endowments=endowments,
        other_endowment=parse_amount_text(other) if other is not None else None,
        subgroup=_int_list(subgroup, "subgroup") if subgroup is not None else None,
        permutation=_int_list(permutation, "permutation") if permutation is not None else None,
        scale=parse_amount_text(scale) if scale is not None else None,
        claim_increase=increase,
        enlarged=problem_from_json(enlarged) if enlarged is not None else None,
    )


def instance_to_json(instance: AxiomInstance) -> Dict[str, Any]:
    payload = problem_to_json(instance.problem)
    if instance.endowments is not None:
        payload["E1"], payload["E2"] = format_vector(instance.endowments)
    if instance.other_endowment is not None:
        payload["E_prime"] = format_amount(instance.other_endowment)
    if instance.subgroup is not None:
        payload["subgroup"] = list(instance.subgroup)
    if instance.permutation is not None:
        payload["permutation"] = list(instance.permutation)
    if instance.scale is not None:
        payload["scaled_by"] = format_amount(instance.scale)
    if instance.claim_increase is not None:
        agent, new_claim = instance.claim_increase
        payload["claim_increase"] = {"agent": agent, "new_claim": format_amount(new_claim)}
    if instance.enlarged is not None:
        payload["enlarged"] = problem_to_json(instance.enlarged)
    return payload


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


def awards_to_json(agents, awards: Vector) -> Dict[str, Any]:
    return {"agents": list(agents), "awards": format_vector(awards)}


def solution_to_json(
    hp: HistoricalProblem,
    solution: HistoricalSolution,
    trace: Optional[IterativeTrace] = None,
) -> Dict[str, Any]:
    payload = awards_to_json(hp.agents, solution.awards)
    payload["lambda"] = format_amount(solution.lambda_)
    payload["tentative"] = format_vector(solution.tentative)
    payload["satiated"] = [hp.agents[i] for i in sorted(solution.satiated)]
    if trace is not None:
        payload["stages"] = [
            {"members": sorted(stage.members), "excess": format_amount(stage.excess)}
            for stage in trace.stages
        ]
    return payload


def _witness_to_json(witness: Witness) -> Dict[str, Any]:
    return {
        "instance": instance_to_json(witness.instance),
        "relation": witness.relation,
        "agents": list(witness.agents),
        "lhs": format_vector(witness.lhs),
        "rhs": format_vector(witness.rhs),
    }


def result_to_json(result: CheckResult) -> Dict[str, Any]:
    return {
        "axiom": result.axiom.value,
        "scope": result.scope.value,
        "verdict": result.verdict.value,
        "trials": result.trials,
        "witness": _witness_to_json(result.witness) if result.witness else None,
    }


def report_to_json(records: Iterable[FixtureRecord]) -> Dict[str, Any]:
    entries = []
    for record in records:
        entries.append(
            {
                "name": record.name,
                "axiom": record.axiom.value,
                "expected": {k: format_vector(v) for k, v in record.expected.items()},
                "computed": {k: format_vector(v) for k, v in record.computed.items()},
                "violation_confirmed": record.violation_confirmed,
                "match": record.match,
            }
        )
    return {"all_match": all(e["match"] for e in entries), "fixtures": entries}


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


def path_to_json(path: AwardPath) -> Dict[str, Any]:
    return {
        "agents": list(path.agents),
        "claims": format_vector(path.claims),
        "vertices": [
            {"endowment": format_amount(e), "awards": format_vector(x)}
            for e, x in path.vertices
        ],
    }


def path_to_csv(path: AwardPath) -> str:
    """Render a path as CSV with header ``endowment,award_<id>,...``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["endowment"] + [f"award_{agent}" for agent in path.agents])
    for endowment, awards in path.vertices:
        writer.writerow([format_amount(endowment)] + format_vector(awards))
    return buffer.getvalue()
