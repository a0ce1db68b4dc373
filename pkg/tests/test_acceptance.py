"""Acceptance criteria 1-9, each with its tolerance checks and time budget.

Every criterion prints one ``PASS``/``FAIL`` line (visible without ``-s``).
"""

from __future__ import annotations

import pytest

from toda.verify import ACCEPTANCE, run_suite


@pytest.mark.parametrize("label,fn,budget", ACCEPTANCE, ids=[a[0].split()[0] for a in ACCEPTANCE])
def test_criterion(label, fn, budget, capsys):
    res = run_suite(label, fn, budget)
    status = "PASS" if res.passed else "FAIL"
    with capsys.disabled():
        print(f"\n{status} criterion {label} ({res.seconds:.2f}s, budget {budget:g}s, {len(res.checks)} checks)")
        for f in res.failures():
            print(f"    {f}")
    assert res.checks, "criterion ran no checks"
    assert res.passed, "; ".join(res.failures())
