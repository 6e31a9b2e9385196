"""The ten acceptance criteria.

Each test runs one criterion through :mod:`procount.suites` (the same code as
``procount verify``), prints its PASS/FAIL line and asserts it passed.  The
lines are collected again in the terminal summary.
"""

import pytest

from procount import suites

CRITERIA = [
    suites.criterion_1,
    suites.criterion_2,
    suites.criterion_3,
    suites.criterion_4,
    suites.criterion_5,
    suites.criterion_6,
    suites.criterion_7,
    suites.criterion_8,
    suites.criterion_9,
    suites.criterion_10,
]


@pytest.mark.parametrize("run", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(run, record_criterion):
    result = record_criterion(run())
    print(result.line())
    assert result.passed, result.detail
