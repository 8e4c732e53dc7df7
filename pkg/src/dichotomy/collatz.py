"""The Collatz map as a worked example.

Python integers are arbitrary precision, so ``collatz_step`` never wraps; the
range verifier avoids storing whole trajectories by following each start only
until it drops below itself and stitching the rest from earlier starts.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

from .props import FAILS, HOLDS, Proposition, Truth, unknown


def collatz_step(n: int) -> int:
    if n < 0:
        raise ValueError("collatz_step is defined on the naturals")
    return n >> 1 if n & 1 == 0 else 3 * n + 1


class Outcome(Enum):
    REACHES_ONE = "reaches-one"
    CYCLE_WITHOUT_ONE = "cycle-without-one"
    BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class TrajectoryResult:
    outcome: Outcome
    # steps taken for REACHES_ONE, cycle entry for CYCLE_WITHOUT_ONE,
    # last value for BUDGET_EXCEEDED
    value: int
    peak_value: int

    @property
    def reaches_one(self) -> bool:
        return self.outcome is Outcome.REACHES_ONE


def trajectory(n: int, budget: int) -> TrajectoryResult:
    """Iterate the map from ``n`` until 1, a repeated value, or ``budget`` steps."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    peak = n
    seen = {n}
    steps = 0
    while n != 1:
        if steps == budget:
            return TrajectoryResult(Outcome.BUDGET_EXCEEDED, n, peak)
        n = collatz_step(n)
        steps += 1
        if n > peak:
            peak = n
        if n in seen:
            return TrajectoryResult(Outcome.CYCLE_WITHOUT_ONE, n, peak)
        seen.add(n)
    return TrajectoryResult(Outcome.REACHES_ONE, steps, peak)


def collatz_proposition(budget: int) -> Proposition:
    """"The orbit of n reaches 1", evaluated within ``budget`` steps.

    No class-level decision exists, so the exact prover refuses it.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")

    def eval_(n: int) -> Truth:
        res = trajectory(n, budget)
        if res.outcome is Outcome.REACHES_ONE:
            return HOLDS
        if res.outcome is Outcome.CYCLE_WITHOUT_ONE:
            return FAILS
        return unknown(budget)

    return Proposition(f"collatz:{budget}", eval_)


def no_fixed_point_check(N: int) -> bool:
    """True iff ``collatz_step(n) != n`` for every ``1 <= n < N``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return all(collatz_step(n) != n for n in range(1, N))


# ---------------------------------------------------------------------------
# range verification


@dataclass
class RangeReport:
    lo: int
    hi: int
    budget: int
    checked: int = 0
    max_steps: int = 0
    max_steps_at: int | None = None
    max_peak: int = 0
    max_peak_at: int | None = None
    failures: list[tuple[int, TrajectoryResult]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict[str, Any]:
        return {
            "range": [str(self.lo), str(self.hi)],
            "budget": str(self.budget),
            "checked": str(self.checked),
            "failures": [
                {"n": str(n), "outcome": r.outcome.value, "value": str(r.value), "peak": str(r.peak_value)}
                for n, r in self.failures
            ],
            "max_steps": str(self.max_steps),
            "max_steps_at": None if self.max_steps_at is None else str(self.max_steps_at),
            "max_peak": str(self.max_peak),
            "max_peak_at": None if self.max_peak_at is None else str(self.max_peak_at),
        }


def _glide(n: int, budget: int) -> tuple[int, int, int]:
    """Follow ``n`` until it reaches 1, drops below ``n``, returns to ``n``, or spends the budget.

    Returns ``(steps, peak, stop_value)``; ``stop_value == n`` flags a cycle
    through ``n``, ``stop_value > n`` an exhausted budget.
    """
    start = peak = n
    steps = 0
    while steps < budget:
        n = n >> 1 if n & 1 == 0 else 3 * n + 1
        steps += 1
        if n > peak:
            peak = n
        if n < start or n == 1 or n == start:
            return steps, peak, n
    return steps, peak, n


def _glide_chunk(args: tuple[int, int, int]) -> list[tuple[int, int, int]]:
    a, b, budget = args
    return [_glide(n, budget) for n in range(a, b)]


def _chunks(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    size = max(1, -(-(hi - lo) // parts))
    return [(a, min(a + size, hi)) for a in range(lo, hi, size)]


def verify_range(lo: int, hi: int, budget: int = 10_000, parallelism: int = 1) -> RangeReport:
    """Check every trajectory that starts in ``[lo, hi)``.

    Each start is followed only until it drops below itself; the remaining
    step count and peak come from the already-merged result of the value it
    dropped to (or a direct trajectory when that value lies below ``lo``).
    Glides are computed in disjoint chunks, possibly in worker processes, and
    merged in ascending order, so the report does not depend on
    ``parallelism``. Per-start outcomes agree with :func:`trajectory` except
    that a cycle not passing through the start reports as budget exhaustion.
    """
    if lo < 0 or hi <= lo:
        raise ValueError("need 0 <= lo < hi")
    if budget < 1:
        raise ValueError("budget must be >= 1")

    parts = max(1, parallelism) * 4 if parallelism > 1 else 1
    jobs = [(a, b, budget) for a, b in _chunks(lo, hi, parts)]
    if parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            glides = [g for chunk in pool.map(_glide_chunk, jobs) for g in chunk]
    else:
        glides = _glide_chunk((lo, hi, budget))

    report = RangeReport(lo, hi, budget)
    # per start: (total steps or None when it never reaches 1, peak, failure result)
    total: list[int | None] = [None] * (hi - lo)
    peaks: list[int] = [0] * (hi - lo)
    failed: dict[int, TrajectoryResult] = {}
    below: dict[int, TrajectoryResult] = {}

    for i, (steps, peak, stop) in enumerate(glides):
        n = lo + i
        res: TrajectoryResult
        if n == 1:
            res = TrajectoryResult(Outcome.REACHES_ONE, 0, 1)
        elif stop == n:
            res = TrajectoryResult(Outcome.CYCLE_WITHOUT_ONE, n, peak)
        elif stop == 1:
            res = TrajectoryResult(Outcome.REACHES_ONE, steps, peak)
        elif stop > n:
            res = TrajectoryResult(Outcome.BUDGET_EXCEEDED, stop, peak)
        else:
            if stop >= lo:
                j = stop - lo
                rest_steps, rest_peak, rest_fail = total[j], peaks[j], failed.get(stop)
            else:
                if stop not in below:
                    below[stop] = trajectory(stop, budget)
                r = below[stop]
                rest_fail = None if r.reaches_one else r
                rest_steps = r.value if r.reaches_one else None
                rest_peak = r.peak_value
            top = max(peak, rest_peak)
            if rest_fail is not None:
                res = TrajectoryResult(rest_fail.outcome, rest_fail.value, top)
            elif steps + rest_steps > budget:
                res = TrajectoryResult(Outcome.BUDGET_EXCEEDED, stop, top)
            else:
                res = TrajectoryResult(Outcome.REACHES_ONE, steps + rest_steps, top)

        peaks[i] = res.peak_value
        report.checked += 1
        if res.reaches_one:
            total[i] = res.value
            if res.value > report.max_steps or report.max_steps_at is None:
                report.max_steps, report.max_steps_at = res.value, n
        else:
            failed[n] = res
            report.failures.append((n, res))
        if res.peak_value > report.max_peak or report.max_peak_at is None:
            report.max_peak, report.max_peak_at = res.peak_value, n
    return report


def default_threads() -> int:
    value = os.environ.get("DICHOTOMY_THREADS", "")
    return int(value) if value.isdigit() and int(value) > 0 else 1


# ---------------------------------------------------------------------------
# descent certificates


@dataclass(frozen=True)
class DescentCertificate:
    modulus_exponent: int
    step_bound: int
    # per remainder: steps after which the class is certified below its start, None if unknown
    entries: tuple[int | None, ...]

    def status(self, r: int) -> str:
        b = self.entries[r]
        return "Unknown" if b is None else f"Descends({b})"

    @property
    def certified(self) -> list[int]:
        return [r for r, b in enumerate(self.entries) if b is not None]

    @property
    def certified_fraction(self) -> Fraction:
        return Fraction(len(self.certified), len(self.entries))

    def to_json(self) -> dict[str, Any]:
        return {
            "modulus_exponent": self.modulus_exponent,
            "step_bound": self.step_bound,
            "entries": [
                {"remainder": str(r), "status": "unknown" if b is None else "descends", "steps": b}
                for r, b in enumerate(self.entries)
            ],
            "certified_fraction": str(self.certified_fraction),
        }


def _descends(k: int, r: int, step_bound: int) -> int | None:
    # n = coef*a + const with n = 2^k*a + r initially; parity is known only while coef is even
    coef, const = 1 << k, r
    for step in range(1, step_bound + 1):
        if coef & 1:
            return None
        if const & 1 == 0:
            coef, const = coef >> 1, const >> 1
        else:
            coef, const = 3 * coef, 3 * const + 1
        # coef*a + const < 2^k*a + r for every a >= 1
        gap = (1 << k) - coef
        if gap > 0 and gap + r - const > 0:
            return step
        if gap == 0 and r > const:
            return step
    return None


def descent_analysis(k: int, step_bound: int = 64) -> DescentCertificate:
    """Symbolically iterate the map on ``2**k * a + r`` for every ``r``.

    ``Descends(b)`` for ``r`` certifies that every ``n = 2**k * a + r`` with
    ``a >= 1`` falls strictly below ``n`` within ``b`` steps.
    """
    if not 0 <= k <= 24:
        raise ValueError("k must be in [0, 24]")
    if step_bound < 1:
        raise ValueError("step_bound must be >= 1")
    return DescentCertificate(k, step_bound, tuple(_descends(k, r, step_bound) for r in range(1 << k)))
