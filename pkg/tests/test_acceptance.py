"""One test per acceptance criterion; each prints a pass/fail line with its measured value."""

import pytest

from ringdft.validation import CHECKS

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("name", list(CHECKS))
def test_criterion(name):
    result = CHECKS[name]()
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.passed, line
