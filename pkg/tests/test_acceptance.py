"""Acceptance criteria 1-10 at their target tolerances.

Each test prints one pass/fail line; the lines are repeated in the terminal
summary.  Run this file directly to print the table without pytest.
"""
import pytest

from symtrace.acceptance import CRITERIA, run_criterion

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:
    ACCEPTANCE_LINES = []


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    res = run_criterion(number)
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    failed = [ch for ch in res.checks if not ch["ok"]]
    assert res.passed, "\n".join(f"{ch['name']}: error {ch['error']:.3e} > tol {ch['tol']:.1e}"
                                 for ch in failed)


if __name__ == "__main__":
    for k in sorted(CRITERIA):
        print(run_criterion(k).line(), flush=True)
