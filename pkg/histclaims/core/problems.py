"""
Claims Problems Module

Domain model for standard and historical claims problems: exact amounts,
problems, histories, validation, and the history aggregates that build
history-adjusted claims.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

Amount = Fraction
Vector = Tuple[Fraction, ...]
Allocation = Vector

AmountLike = Union[int, Fraction, str]

_AMOUNT_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class ValidationError(ValueError):
    """A problem, history, or allocation breaks one of its invariants.

    Attributes:
        index: Offending agent position, ``(period, position)`` for history
            errors, or ``None`` when the error is not tied to an agent.
    """

    def __init__(self, message: str, index=None):
        super().__init__(message)
        self.index = index


class NegativeClaim(ValidationError):
    pass


class NegativeEndowment(ValidationError):
    pass


class InfeasibleEndowment(ValidationError):
    pass


class ZeroTotalClaims(ValidationError):
    pass


class DuplicateAgent(ValidationError):
    pass


class InvalidAgent(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class BoundednessViolated(ValidationError):
    pass


class BalanceViolated(ValidationError):
    pass


class HistoryBoundednessViolated(ValidationError):
    pass


def parse_amount(value: AmountLike) -> Fraction:
    """Convert an int, Fraction, or ``"p"``/``"p/q"`` string to an exact amount.

    Floats are rejected outright: every amount in the engine is exact.

    Args:
        value: The value to convert.

    Returns:
        The canonical Fraction.

    Raises:
        TypeError: If ``value`` is a float, bool, or unsupported type.
        ValueError: If a string is not an integer or ``p/q`` fraction, or
            has a zero denominator.
    """
    if isinstance(value, bool):
        raise TypeError(f"Amounts must be exact, got boolean {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(f"Amounts must be exact, got float {value!r}")
    if isinstance(value, str):
        match = _AMOUNT_PATTERN.match(value)
        if match is None:
            raise ValueError(
                f"Amounts must be integers or 'p/q' fractions, got {value!r}"
            )
        numerator = int(match.group(1))
        denominator = int(match.group(2)) if match.group(2) is not None else 1
        if denominator == 0:
            raise ValueError(f"Zero denominator in amount {value!r}")
        return Fraction(numerator, denominator)
    raise TypeError(f"Unsupported amount type: {type(value).__name__}")


def to_vector(values: Iterable[AmountLike]) -> Vector:
    return tuple(parse_amount(v) for v in values)


def _default_agents(count: int) -> Tuple[int, ...]:
    return tuple(range(1, count + 1))


@dataclass(frozen=True)
class ClaimsProblem:
    """A standard claims problem ``(N, c, E)``.

    Construction only normalizes types. Call :func:`validate_problem` to
    enforce nonnegativity and feasibility.
    """

    agents: Tuple[int, ...]
    claims: Vector
    endowment: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(int(a) for a in self.agents))
        object.__setattr__(self, "claims", to_vector(self.claims))
        object.__setattr__(self, "endowment", parse_amount(self.endowment))

    @classmethod
    def of(
        cls,
        claims: Sequence[AmountLike],
        endowment: AmountLike,
        agents: Optional[Sequence[int]] = None,
    ) -> "ClaimsProblem":
        if agents is None:
            agents = _default_agents(len(claims))
        return cls(tuple(agents), tuple(claims), endowment)

    @property
    def size(self) -> int:
        return len(self.agents)

    @property
    def total_claims(self) -> Fraction:
        return sum(self.claims, Fraction(0))

    def position(self, agent: int) -> int:
        """Return the position of ``agent`` in the agent list."""
        try:
            return self.agents.index(agent)
        except ValueError:
            raise InvalidAgent(f"Agent {agent} is not part of the problem") from None


@dataclass(frozen=True)
class PeriodRecord:
    """Claims and allocations of one past period.

    The period endowment is derived from the allocations and never stored.
    """

    claims: Vector
    allocations: Vector

    def __post_init__(self) -> None:
        object.__setattr__(self, "claims", to_vector(self.claims))
        object.__setattr__(self, "allocations", to_vector(self.allocations))

    @property
    def endowment(self) -> Fraction:
        return sum(self.allocations, Fraction(0))


@dataclass(frozen=True)
class History:
    """Ordered past periods over a fixed set of agents."""

    periods: Tuple[PeriodRecord, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "periods", tuple(self.periods))

    @classmethod
    def of(cls, pairs: Iterable[Tuple[Sequence, Sequence]]) -> "History":
        """Build a history from ``(claims, allocations)`` pairs."""
        return cls(tuple(PeriodRecord(tuple(c), tuple(x)) for c, x in pairs))

    def __len__(self) -> int:
        return len(self.periods)

    def __add__(self, other: "History") -> "History":
        return History(self.periods + other.periods)

    def restrict(self, positions: Sequence[int]) -> "History":
        return History(
            tuple(
                PeriodRecord(
                    tuple(p.claims[k] for k in positions),
                    tuple(p.allocations[k] for k in positions),
                )
                for p in self.periods
            )
        )


@dataclass(frozen=True)
class HistoricalProblem:
    """A claims problem with history ``(N, c, E, h)``."""

    problem: ClaimsProblem
    history: History = field(default_factory=History)

    @classmethod
    def of(
        cls,
        claims: Sequence[AmountLike],
        endowment: AmountLike,
        history: Iterable[Tuple[Sequence, Sequence]] = (),
        agents: Optional[Sequence[int]] = None,
    ) -> "HistoricalProblem":
        return cls(ClaimsProblem.of(claims, endowment, agents), History.of(history))

    @property
    def agents(self) -> Tuple[int, ...]:
        return self.problem.agents

    @property
    def claims(self) -> Vector:
        return self.problem.claims

    @property
    def endowment(self) -> Fraction:
        return self.problem.endowment

    @property
    def size(self) -> int:
        return self.problem.size


@dataclass(frozen=True)
class HistoryAggregates:
    delta_claims: Vector
    delta_awards: Vector
    delta: Vector
    adjusted_claims: Vector


def validate_problem(problem: ClaimsProblem) -> None:
    """Check every :class:`ClaimsProblem` invariant.

    Raises:
        LengthMismatch: If claims and agents differ in length.
        InvalidAgent: If an agent id is not a positive integer.
        DuplicateAgent: If an agent id repeats.
        NegativeClaim: If some claim is negative.
        NegativeEndowment: If the endowment is negative.
        ZeroTotalClaims: If the claims sum to zero.
        InfeasibleEndowment: If the claims sum to less than the endowment.
    """
    if len(problem.claims) != len(problem.agents):
        raise LengthMismatch(
            f"{len(problem.claims)} claims for {len(problem.agents)} agents"
        )
    seen = set()
    for i, agent in enumerate(problem.agents):
        if agent <= 0:
            raise InvalidAgent(f"Agent ids must be positive, got {agent}", i)
        if agent in seen:
            raise DuplicateAgent(f"Agent {agent} appears more than once", i)
        seen.add(agent)
    for i, claim in enumerate(problem.claims):
        if claim < 0:
            raise NegativeClaim(f"Claim of agent {problem.agents[i]} is {claim}", i)
    if problem.endowment < 0:
        raise NegativeEndowment(f"Endowment is {problem.endowment}")
    total = problem.total_claims
    if total == 0:
        raise ZeroTotalClaims("Total claims must be positive")
    if total < problem.endowment:
        raise InfeasibleEndowment(
            f"Total claims {total} fall short of endowment {problem.endowment}"
        )


def validate_allocation(problem: ClaimsProblem, awards: Sequence[Fraction]) -> None:
    """Check boundedness and balance of ``awards`` for ``problem``.

    Raises:
        LengthMismatch: If ``awards`` is not aligned with the agents.
        BoundednessViolated: If some award is negative or above its claim.
        BalanceViolated: If the awards do not sum to the endowment.
    """
    if len(awards) != len(problem.agents):
        raise LengthMismatch(
            f"{len(awards)} awards for {len(problem.agents)} agents"
        )
    for i, (award, claim) in enumerate(zip(awards, problem.claims)):
        if award < 0 or award > claim:
            raise BoundednessViolated(
                f"Award {award} of agent {problem.agents[i]} is outside [0, {claim}]",
                i,
            )
    total = sum(awards, Fraction(0))
    if total != problem.endowment:
        raise BalanceViolated(
            f"Awards sum to {total}, endowment is {problem.endowment}"
        )


def _validate_history(history: History, size: int) -> None:
    for t, period in enumerate(history.periods):
        if len(period.claims) != size or len(period.allocations) != size:
            raise LengthMismatch(
                f"Period {t} covers {len(period.claims)} agents, expected {size}",
                (t, None),
            )
        for i, (claim, award) in enumerate(zip(period.claims, period.allocations)):
            if award < 0 or award > claim:
                raise HistoryBoundednessViolated(
                    f"Period {t}: allocation {award} outside [0, {claim}] "
                    f"at position {i}",
                    (t, i),
                )


def validate_historical(hp: HistoricalProblem) -> None:
    """Validate the present problem and every past period."""
    validate_problem(hp.problem)
    _validate_history(hp.history, hp.size)


def aggregates(hp: HistoricalProblem) -> HistoryAggregates:
    """Aggregate past claims and allocations into history-adjusted claims.

    Args:
        hp: The historical problem.

    Returns:
        ``delta_claims`` (sum of past claims), ``delta_awards`` (sum of past
        allocations), ``delta`` (their difference) and ``adjusted_claims``
        (present claims plus ``delta``).

    Raises:
        HistoryBoundednessViolated: If some past allocation was outside
            ``[0, claim]``.
    """
    _validate_history(hp.history, hp.size)
    zero = Fraction(0)
    n = hp.size
    delta_claims = [zero] * n
    delta_awards = [zero] * n
    for period in hp.history.periods:
        for i in range(n):
            delta_claims[i] += period.claims[i]
            delta_awards[i] += period.allocations[i]
    delta = tuple(dc - dx for dc, dx in zip(delta_claims, delta_awards))
    adjusted = tuple(c + d for c, d in zip(hp.claims, delta))
    return HistoryAggregates(
        delta_claims=tuple(delta_claims),
        delta_awards=tuple(delta_awards),
        delta=delta,
        adjusted_claims=adjusted,
    )


# ---------------------------------------------------------------------------
# Problem transformations used by the axiom checkers
# ---------------------------------------------------------------------------


def with_endowment(hp: HistoricalProblem, endowment: AmountLike) -> HistoricalProblem:
    return replace(hp, problem=replace(hp.problem, endowment=parse_amount(endowment)))


def with_claims(hp: HistoricalProblem, claims: Sequence[AmountLike]) -> HistoricalProblem:
    return replace(hp, problem=replace(hp.problem, claims=to_vector(claims)))


def restrict(
    hp: HistoricalProblem, members: Sequence[int], endowment: AmountLike
) -> HistoricalProblem:
    """Restrict ``hp`` to the agents ``members`` with a new endowment.

    Present claims and every period of the history are restricted
    componentwise; agents keep their relative order.
    """
    member_set = set(members)
    positions = [k for k, agent in enumerate(hp.agents) if agent in member_set]
    if len(positions) != len(member_set):
        missing = sorted(member_set - set(hp.agents))
        raise InvalidAgent(f"Agents {missing} are not part of the problem")
    problem = ClaimsProblem(
        tuple(hp.agents[k] for k in positions),
        tuple(hp.claims[k] for k in positions),
        parse_amount(endowment),
    )
    return HistoricalProblem(problem, hp.history.restrict(positions))


def permute(hp: HistoricalProblem, permutation: Sequence[int]) -> HistoricalProblem:
    """Hand agent ``permutation[k]`` the claim and history of ``agents[k]``.

    The agent list itself is unchanged; only the data moves.
    """
    if sorted(permutation) != sorted(hp.agents):
        raise InvalidAgent(
            f"Permutation {list(permutation)} does not rearrange {list(hp.agents)}"
        )
    target = [hp.agents.index(agent) for agent in permutation]
    order = [0] * hp.size
    for source, destination in enumerate(target):
        order[destination] = source

    def move(vector: Vector) -> Vector:
        return tuple(vector[order[k]] for k in range(len(vector)))

    problem = replace(hp.problem, claims=move(hp.claims))
    history = History(
        tuple(PeriodRecord(move(p.claims), move(p.allocations)) for p in hp.history.periods)
    )
    return HistoricalProblem(problem, history)


def scale(hp: HistoricalProblem, rho: AmountLike) -> HistoricalProblem:
    """Multiply claims, endowment, and the whole history by ``rho``."""
    factor = parse_amount(rho)
    problem = ClaimsProblem(
        hp.agents,
        tuple(factor * c for c in hp.claims),
        factor * hp.endowment,
    )
    history = History(
        tuple(
            PeriodRecord(
                tuple(factor * c for c in p.claims),
                tuple(factor * x for x in p.allocations),
            )
            for p in hp.history.periods
        )
    )
    return HistoricalProblem(problem, history)
