"""Acceptance battery: one pass/fail line per criterion at the pinned tolerances."""

import pytest

from skewcarleson.acceptance import CRITERIA, run_acceptance


@pytest.fixture(scope="module")
def results():
    out = {r.number: r for r in run_acceptance(seed=0)}
    print()
    for number in sorted(out):
        print(out[number].line())
    return out


@pytest.mark.parametrize("number", [c.number for c in CRITERIA], ids=[f"criterion_{c.number}" for c in CRITERIA])
def test_criterion(results, number, capsys):
    res = results[number]
    with capsys.disabled():
        print(f"\n{res.line()}", end="")
    assert res.passed, f"criterion {number} failed: {res.evidence}"
    if res.budget is not None:
        assert res.runtime < res.budget


def test_battery_sizes():
    from skewcarleson.acceptance import cross_battery, sandwich_battery

    assert len(cross_battery()) >= 6
    assert len(sandwich_battery()) >= 8
    assert all(op.hypothesis_ok for _, op in sandwich_battery())
