"""Every acceptance criterion at its stated tolerance, one line per criterion."""

import pytest

from eulerstab.validation import CHECKS, ValidationContext, run_one


@pytest.fixture(scope="module")
def ctx():
    return ValidationContext()


# the hygiene check audits the matrices computed by the others, so order matters
@pytest.mark.parametrize("number", [c[0] for c in CHECKS], ids=[f"{c[0]:02d}" for c in CHECKS])
def test_criterion(number, ctx, acceptance_log):
    res = run_one(number, ctx)
    acceptance_log.append(res.line())
    assert res.passed, res.line()


def test_suite_size():
    assert len(CHECKS) >= 12
