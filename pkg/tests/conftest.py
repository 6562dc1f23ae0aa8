"""Shared pytest fixtures.

Builds the published historical problems used across the suite and exposes
the trial budget of the randomized tests, read from ``HISTCLAIMS_TEST_BUDGET``
(set it to 10000 for the full acceptance run).
"""

import os

import numpy as np
import pytest

from histclaims.core.problems import HistoricalProblem


def _budget() -> int:
    return int(os.environ.get("HISTCLAIMS_TEST_BUDGET", "1000"))


@pytest.fixture
def budget() -> int:
    return _budget()


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def cel_composition_problem() -> HistoricalProblem:
    return HistoricalProblem.of((10, 5, 2), 15, [((7, 7, 20), (2, 2, 2))])


@pytest.fixture
def prop_consistency_problem() -> HistoricalProblem:
    return HistoricalProblem.of((2, 4, 8, 6), 9, [((12, 7, 6, 4), (2, 2, 2, 2))])


@pytest.fixture
def dagger_problem() -> HistoricalProblem:
    return HistoricalProblem.of((4, 1, 2), 3, [((3, 3, 3), (2, 2, 1))])


@pytest.fixture
def self_duality_problem() -> HistoricalProblem:
    return HistoricalProblem.of((2, 4), 2, [((2, 2), (1, 1))])


@pytest.fixture
def independence_problem() -> HistoricalProblem:
    return HistoricalProblem.of((3, 4), 5)
