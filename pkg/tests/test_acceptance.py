"""Acceptance criteria at full scale, one pass/fail line per criterion.

Run directly (``python tests/test_acceptance.py [quick|full]``) or through
pytest, where the lines are printed as each criterion finishes.
"""

import sys

import pytest

from gogtools.acceptance import CRITERIA, format_line, run_criteria

LEVEL = "full"
LIMITS = {1: 60, 6: 300}  # seconds, for criteria that state a budget


@pytest.fixture(scope="module")
def results():
    return {}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, results, capsys):
    (r,) = run_criteria(LEVEL, only={number})
    results[number] = r
    with capsys.disabled():
        print("\n" + format_line(r, timing=True))
    assert r.passed, r.detail
    if number in LIMITS:
        assert r.seconds <= LIMITS[number], f"took {r.seconds:.1f}s"


if __name__ == "__main__":
    level = sys.argv[1] if len(sys.argv) > 1 else LEVEL
    out = run_criteria(level, on_result=lambda r: print(format_line(r, timing=True), flush=True))
    sys.exit(0 if all(r.passed for r in out) else 1)
