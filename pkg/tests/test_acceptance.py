"""Acceptance criteria at their target tolerances.

Each check prints one ``[PASS|FAIL|INFO]`` line.  Checks that fail here are
genuine failures of the criterion, not test bugs; run
``python3 tests/test_acceptance.py`` for the bare list.
"""

from __future__ import annotations

import sys

import pytest

from spinkinetics.validation import CHECKS, AcceptanceContext, format_line, run_acceptance, summary


@pytest.fixture(scope="module")
def ctx():
    return AcceptanceContext()


@pytest.mark.parametrize("cid", list(CHECKS))
def test_criterion(ctx, cid, capsys):
    (result,) = run_acceptance(ctx, [cid])
    with capsys.disabled():
        print("\n" + format_line(result))
    if not result.informational:
        assert result.passed, format_line(result)


if __name__ == "__main__":
    results = run_acceptance()
    for r in results:
        print(format_line(r))
    s = summary(results)
    print(f"{s['n_passed']} passed, {s['n_failed']} failed")
    sys.exit(0 if s["all_passed"] else 1)
