"""Acceptance suite: each criterion prints one pass/fail line with its timing."""

from __future__ import annotations

import pytest

from fpconv import acceptance


@pytest.mark.parametrize("index", range(1, 11))
def test_criterion(index, capsys):
    result = acceptance.CRITERIA[index - 1]()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
    assert result.within_budget, result.line()
