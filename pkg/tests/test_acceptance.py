"""Acceptance criteria, each at its stated tolerance and runtime budget.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""
import pytest

from haps_secrecy.verification import CRITERIA, run_criteria

REPORT: list[str] = []


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    (result,) = run_criteria([number])
    REPORT.append(result.line())
    assert result.passed, result.line()
