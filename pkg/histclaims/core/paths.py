"""
Paths of Awards Module

Traces how awards move as the endowment sweeps from zero to total claims,
both for standard rules and for the rules the historical operator induces.
Exact mode emits the true polyline vertices; sampled mode evaluates the rule
at equally spaced endowments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

from .operator import apply_historical
from .problems import (
    AmountLike,
    ClaimsProblem,
    HistoricalProblem,
    History,
    Vector,
    aggregates,
    to_vector,
    validate_historical,
    validate_problem,
    with_endowment,
)
from .rules import RuleHandle

DEFAULT_SAMPLES = 101

EXACT = "exact"

Samples = Union[int, str]
Vertex = Tuple[Fraction, Vector]


class ExactModeUnsupported(ValueError):
    """The rule has no kink enumerator, so its exact path cannot be traced."""


@dataclass(frozen=True)
class AwardPath:
    """A path of awards as ``(endowment, awards)`` vertices, endowments ascending."""

    agents: Tuple[int, ...]
    claims: Vector
    vertices: Tuple[Vertex, ...]

    @property
    def endowments(self) -> Tuple[Fraction, ...]:
        return tuple(e for e, _ in self.vertices)

    def at(self, endowment: AmountLike) -> Vector:
        """Interpolate the awards at ``endowment`` along the polyline.

        Raises:
            ValueError: If ``endowment`` lies outside the traced range.
        """
        target = Fraction(endowment)
        first, last = self.vertices[0][0], self.vertices[-1][0]
        if target < first or target > last:
            raise ValueError(f"Endowment {target} outside [{first}, {last}]")
        for (e0, x0), (e1, x1) in zip(self.vertices, self.vertices[1:]):
            if e0 <= target <= e1:
                if target == e0:
                    return x0
                weight = (target - e0) / (e1 - e0)
                return tuple(a + weight * (b - a) for a, b in zip(x0, x1))
        return self.vertices[-1][1]


def _collinear(a: Vertex, b: Vertex, c: Vertex) -> bool:
    (e0, x0), (e1, x1), (e2, x2) = a, b, c
    return all(
        (p1 - p0) * (e2 - e0) == (p2 - p0) * (e1 - e0)
        for p0, p1, p2 in zip(x0, x1, x2)
    )


def _simplify(vertices: Sequence[Vertex]) -> Tuple[Vertex, ...]:
    kept: List[Vertex] = []
    for vertex in vertices:
        while len(kept) >= 2 and _collinear(kept[-2], kept[-1], vertex):
            kept.pop()
        kept.append(vertex)
    return tuple(kept)


def _sample_endowments(total: Fraction, samples: int) -> List[Fraction]:
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 2:
        raise ValueError(f"samples must be an integer >= 2 or {EXACT!r}, got {samples!r}")
    return [total * k / (samples - 1) for k in range(samples)]


def _inner(points, total: Fraction) -> List[Fraction]:
    return [p for p in points if 0 < p < total]


def _require_kinks(rule: RuleHandle) -> None:
    if rule.kinks is None:
        raise ExactModeUnsupported(
            f"Rule {rule.name!r} has no kink enumerator; use a sample count instead"
        )


def trace_standard(
    rule: RuleHandle,
    claims: Sequence[AmountLike],
    samples: Samples = EXACT,
    agents: Optional[Sequence[int]] = None,
) -> AwardPath:
    """Trace ``E -> R(N, c, E)`` over ``[0, sum(c)]``.

    Args:
        rule: The standard rule.
        claims: Claims vector.
        samples: ``"exact"`` or the number of equally spaced endowments.
        agents: Agent ids; ``1..n`` by default.

    Returns:
        The path. In exact mode consecutive vertices are never collinear.

    Raises:
        ExactModeUnsupported: In exact mode, if the rule has no kinks map.
        ValidationError: If the claims are invalid.
    """
    base = ClaimsProblem.of(to_vector(claims), 0, agents)
    validate_problem(base)
    total = base.total_claims

    def point(endowment: Fraction) -> Vertex:
        problem = ClaimsProblem(base.agents, base.claims, endowment)
        return endowment, rule(problem)

    if samples == EXACT:
        _require_kinks(rule)
        candidates = {Fraction(0), total}
        candidates.update(_inner(rule.kinks(base.agents, base.claims), total))
        vertices = _simplify([point(e) for e in sorted(candidates)])
    else:
        vertices = tuple(point(e) for e in _sample_endowments(total, samples))
    return AwardPath(base.agents, base.claims, vertices)


def _satiation_events(
    claims: Vector, start: Vertex, end: Vertex
) -> List[Fraction]:
    """Endowments inside one affine piece where the operator's clamp changes.

    On the piece the tentative awards are ``a + b * E``. Agent ``i`` is
    satiated once lambda exceeds ``g_i(E) = c_i - a_i - b_i * E``; the
    satiated set is always a prefix of the agents sorted by ``g``.
    """
    (e0, t0), (e1, t1) = start, end
    n = len(claims)
    slope = tuple((y - x) / (e1 - e0) for x, y in zip(t0, t1))
    offset = tuple(x - b * e0 for x, b in zip(t0, slope))

    def threshold(i: int, endowment: Fraction) -> Fraction:
        return claims[i] - offset[i] - slope[i] * endowment

    cuts = {e0, e1}
    for i, j in combinations(range(n), 2):
        if slope[i] != slope[j]:
            crossing = (claims[i] - offset[i] - claims[j] + offset[j]) / (slope[i] - slope[j])
            if e0 < crossing < e1:
                cuts.add(crossing)

    events = []
    bounds = sorted(cuts)
    for low, high in zip(bounds, bounds[1:]):
        middle = (low + high) / 2
        order = sorted(range(n), key=lambda i: (threshold(i, middle), i))
        for k in range(n):
            prefix, rest = order[:k], order[k:]
            alpha = (
                -sum((claims[i] for i in prefix), Fraction(0))
                - sum((offset[i] for i in rest), Fraction(0))
            ) / len(rest)
            beta = (1 - sum((slope[i] for i in rest), Fraction(0))) / len(rest)
            j = order[k]
            denominator = beta + slope[j]
            if denominator == 0:
                continue
            root = (claims[j] - offset[j] - alpha) / denominator
            if low < root < high:
                events.append(root)
    return sorted(cuts) + events


def trace_historical(
    rule: RuleHandle,
    claims: Sequence[AmountLike],
    history: History,
    samples: Samples = EXACT,
    agents: Optional[Sequence[int]] = None,
) -> AwardPath:
    """Trace ``E -> phi(rule)(N, c, E, h)`` over ``[0, sum(c)]``.

    Exact mode cuts ``[0, C]`` at the base rule's kinks for the adjusted
    claims, then adds every endowment where the set of satiated agents can
    change. The operator is evaluated exactly at each candidate and
    collinear vertices are merged.

    Raises:
        ExactModeUnsupported: In exact mode, if the rule has no kinks map.
        ValidationError: If the claims or history are invalid.
    """
    hp = HistoricalProblem(ClaimsProblem.of(to_vector(claims), 0, agents), history)
    validate_historical(hp)
    total = hp.problem.total_claims

    def point(endowment: Fraction) -> Vertex:
        return endowment, apply_historical(rule, with_endowment(hp, endowment)).awards

    if samples != EXACT:
        vertices = tuple(point(e) for e in _sample_endowments(total, samples))
        return AwardPath(hp.agents, hp.claims, vertices)

    _require_kinks(rule)
    adjusted = aggregates(hp).adjusted_claims

    def tentative(endowment: Fraction) -> Vertex:
        return endowment, rule(ClaimsProblem(hp.agents, adjusted, endowment))

    pieces = sorted({Fraction(0), total} | set(_inner(rule.kinks(hp.agents, adjusted), total)))
    candidates = set(pieces)
    for low, high in zip(pieces, pieces[1:]):
        candidates.update(_satiation_events(hp.claims, tentative(low), tentative(high)))
    vertices = _simplify([point(e) for e in sorted(candidates)])
    return AwardPath(hp.agents, hp.claims, vertices)
