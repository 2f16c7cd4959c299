"""The twelve acceptance criteria at full size.

Each test prints one [PASS]/[FAIL] line with the criterion number, its name and
the wall time, then asserts the outcome.
"""

import pytest

from knalg import acceptance

CASES = [(i, fn) for i, fn in enumerate(acceptance.CRITERIA, start=1)]


@pytest.mark.parametrize("criterion,check", CASES, ids=[f"criterion_{i:02d}_{fn.__name__}" for i, fn in CASES])
def test_criterion(criterion, check, capsys):
    result = check()
    with capsys.disabled():
        print(f"\n{result.line()}")
    assert result.criterion == criterion
    assert result.passed, result.detail
