"""Acceptance gate: every criterion of the suite at its stated tolerance."""

import pytest

from coldgate import cli

_BY_NAME = dict(cli.CRITERIA)


@pytest.mark.parametrize("name", [n for n, _ in cli.CRITERIA])
def test_criterion(name, accept_ctx):
    passed, details = _BY_NAME[name](accept_ctx)
    assert passed, f"{name}: {details}"
