"""The nine acceptance criteria, all exact. Each prints one [PASS]/[FAIL] line."""

import pytest

from padic_stringy.suite import CRITERIA

RESULTS: dict[str, str] = {}


@pytest.mark.parametrize("key", list(CRITERIA))
def test_criterion(key):
    result = CRITERIA[key](0)
    line = result.line()
    RESULTS[key] = line
    print(line)
    assert result.checks > 0
    assert result.passed, "\n".join([line, *result.failures[:10]])
