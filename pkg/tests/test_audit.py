import math

import pytest

from viscid.audit import CHECKS, AuditCheck, all_passed


@pytest.mark.parametrize("check", CHECKS, ids=lambda c: c.__name__)
def test_invariant(check):
    out = check()
    for result in out if isinstance(out, list) else [out]:
        assert result.passed, result.line()
        assert math.isfinite(result.value)


def test_line_format():
    assert AuditCheck("x", 0.5, 1.0, True).line() == "PASS  x: 0.5 <= 1"
    assert AuditCheck("y", 2.0, 3.5, False, ">=").line() == "FAIL  y: 2 >= 3.5"


def test_all_passed_rejects_nan():
    assert all_passed([AuditCheck("a", 0.0, 1.0, True)])
    assert not all_passed([AuditCheck("a", math.nan, 1.0, True)])
    assert not all_passed([AuditCheck("a", 0.0, 1.0, True), AuditCheck("b", 2.0, 1.0, False)])
