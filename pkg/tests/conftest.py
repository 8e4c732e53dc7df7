"""Shared brute-force helpers. Nothing here imports the residue arithmetic."""

from __future__ import annotations

import pytest


def brute_hole_run(holes, steps, bound):
    """Dichotomy on explicit sets: a half is provable iff it holds no hole.

    Returns (decisions, stop) with decisions as "even"/"odd" strings and stop
    one of ("truncated", steps), ("stuck", s), ("closed-both", s).
    """
    unsolved = set(range(bound))
    decisions = []
    for s in range(1, steps + 1):
        even = {n for n in unsolved if (n // 2 ** (s - 1)) % 2 == 0}
        odd = unsolved - even
        even_ok = not (even & set(holes))
        odd_ok = not (odd & set(holes))
        if even_ok and odd_ok:
            return decisions, ("closed-both", s)
        if not (even_ok or odd_ok):
            return decisions, ("stuck", s)
        decisions.append("even" if even_ok else "odd")
        unsolved = odd if even_ok else even
    return decisions, ("truncated", steps)


def brute_unsolved(decisions, bound):
    """Numbers below bound left unsolved after replaying decisions."""
    unsolved = list(range(bound))
    for s, d in enumerate(decisions, start=1):
        proven_bit = 0 if d == "even" else 1
        unsolved = [n for n in unsolved if (n // 2 ** (s - 1)) % 2 != proven_bit]
    return unsolved


@pytest.fixture
def hole_run():
    return brute_hole_run


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
