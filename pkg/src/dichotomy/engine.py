"""The dichotomy step loop, its trace, and what can be read off a trace.

Step ``s`` (``s = 1, 2, ...``) splits the current unsolved class on the
parity of ``n // 2**(s - 1)``, i.e. on bit ``s - 1`` of ``n`` when the run
starts from the naturals. A prover decides which half it can establish; the
other half becomes the new unsolved class. Starting from a class modulo
``2**k0`` shifts the split bit to ``k0 + s - 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from .residue import NATURALS, ResidueClass, split

TRACE_FORMAT = "dichotomy-trace/1"
STEP_CONVENTION = "step s splits the unsolved class on the parity of n // 2^(divisor_exponent)"


class Decision(Enum):
    PROVEN_EVEN = "even"
    PROVEN_ODD = "odd"
    PROVEN_BOTH = "both"
    STUCK = "stuck"

    @property
    def completes_step(self) -> bool:
        return self in (Decision.PROVEN_EVEN, Decision.PROVEN_ODD)


class TerminationKind(Enum):
    TRUNCATED = "truncated"
    CLOSED_BOTH = "closed-both"
    STUCK = "stuck"
    ABORTED = "aborted"
    # finite mode only: at most one unsolved number left below the bound
    RESOLVED = "resolved"


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    step: int
    detail: str = ""

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "step": self.step, "detail": self.detail}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> Termination:
        return cls(TerminationKind(obj["kind"]), int(obj["step"]), str(obj.get("detail", "")))


class ProverError(Exception):
    """A step prover gave up (budget exhausted, script ran out, ...)."""


class TraceFormatError(ValueError):
    pass


StepProver = Callable[[int, ResidueClass, ResidueClass, Sequence[ResidueClass]], Decision]


@dataclass(frozen=True)
class StepRecord:
    step_index: int
    divisor_exponent: int
    decision: Decision
    proven_class: ResidueClass
    unsolved_class: ResidueClass

    def to_json(self) -> dict[str, Any]:
        return {
            "step_index": self.step_index,
            "divisor_exponent": self.divisor_exponent,
            "decision": self.decision.value,
            "proven_class": self.proven_class.to_json(),
            "unsolved_class": self.unsolved_class.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> StepRecord:
        decision = Decision(obj["decision"])
        if not decision.completes_step:
            raise TraceFormatError(f"step decision must be 'even' or 'odd', got {obj['decision']!r}")
        return cls(
            step_index=int(obj["step_index"]),
            divisor_exponent=int(obj["divisor_exponent"]),
            decision=decision,
            proven_class=ResidueClass.from_json(obj["proven_class"]),
            unsolved_class=ResidueClass.from_json(obj["unsolved_class"]),
        )


@dataclass(frozen=True)
class ProofTrace:
    initial_class: ResidueClass
    steps: tuple[StepRecord, ...]
    termination: Termination
    # set for finite-mode runs: U_0 is initial_class ∩ [0, bound)
    bound: int | None = None

    @property
    def unsolved(self) -> ResidueClass:
        return self.steps[-1].unsolved_class if self.steps else self.initial_class

    @property
    def proven(self) -> list[ResidueClass]:
        return [st.proven_class for st in self.steps]

    @property
    def decisions(self) -> list[Decision]:
        return [st.decision for st in self.steps]

    @property
    def truncated(self) -> bool:
        return self.termination.kind is TerminationKind.TRUNCATED

    def unsolved_after(self, s: int) -> ResidueClass:
        return self.steps[s - 1].unsolved_class if s else self.initial_class


def run_dichotomy(prover: StepProver, initial: ResidueClass = NATURALS, max_steps: int = 32) -> ProofTrace:
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    return _run(prover, initial, max_steps, bound=None)


def run_finite(prover: StepProver, bound: int, initial: ResidueClass = NATURALS) -> tuple[ProofTrace, int]:
    """Run on ``initial ∩ [0, bound)`` until at most one unsolved number remains.

    While two or more unsolved numbers lie below the bound both halves of the
    next split are non-empty there, so the prover always sees real halves.
    """
    if bound < 2:
        raise ValueError("bound must be >= 2")
    # a finite set halves each step, so bit_length(bound) steps always suffice
    trace = _run(prover, initial, max_steps=bound.bit_length() + 1, bound=bound)
    return trace, len(trace.steps)


def _run(prover: StepProver, initial: ResidueClass, max_steps: int, bound: int | None) -> ProofTrace:
    unsolved = initial
    steps: list[StepRecord] = []
    proven: list[ResidueClass] = []
    termination = None
    for s in range(1, max_steps + 1):
        if bound is not None and unsolved.count_below(bound) <= 1:
            termination = Termination(TerminationKind.RESOLVED, s - 1)
            break
        even, odd = split(unsolved)
        try:
            decision = prover(s, even, odd, tuple(proven))
        except ProverError as exc:
            termination = Termination(TerminationKind.ABORTED, s, str(exc))
            break
        if decision is Decision.PROVEN_BOTH:
            termination = Termination(TerminationKind.CLOSED_BOTH, s)
            break
        if decision is Decision.STUCK:
            termination = Termination(TerminationKind.STUCK, s)
            break
        if decision is Decision.PROVEN_EVEN:
            done, unsolved = even, odd
        else:
            done, unsolved = odd, even
        proven.append(done)
        steps.append(StepRecord(s, even.modulus_exponent - 1, decision, done, unsolved))
    if termination is None:
        if bound is not None and unsolved.count_below(bound) <= 1:
            termination = Termination(TerminationKind.RESOLVED, len(steps))
        else:
            termination = Termination(TerminationKind.TRUNCATED, len(steps))
    return ProofTrace(initial, tuple(steps), termination, bound)


def candidate_from_trace(t: ProofTrace) -> int:
    """Binary code of the only number left unsolved by the completed steps.

    Bit ``i`` (counted from the initial class's modulus) is 0 when the odd
    half was proven at that step and 1 when the even half was.
    """
    n = t.initial_class.remainder
    for st in t.steps:
        if st.decision is Decision.PROVEN_EVEN:
            n |= 1 << st.divisor_exponent
    return n


def density(t: ProofTrace) -> Fraction:
    return Fraction(1, 1 << len(t.steps))


class Verdict(Enum):
    EVENTUALLY_ODD_ONLY = "eventually-odd-only"
    EVEN_RECURRING_SO_FAR = "even-recurring-so-far"
    CLOSED_OR_STUCK = "closed-or-stuck"


TRUNCATION_CAVEAT = (
    "finite evidence only: a truncated run shows the decisions of its first "
    "{n} steps and says nothing about the steps after them"
)


@dataclass(frozen=True)
class TraceClassification:
    last_even_step: int | None
    candidate_prefix: int
    verdict: Verdict
    caveat: str
    # K for EVENTUALLY_ODD_ONLY (0 when no even decision occurred)
    tail_start: int | None = None

    def describe(self) -> str:
        if self.verdict is Verdict.EVENTUALLY_ODD_ONLY:
            return f"EventuallyOddOnly({self.tail_start})"
        if self.verdict is Verdict.EVEN_RECURRING_SO_FAR:
            return "EvenRecurringSoFar"
        return "ClosedOrStuck"


def classify_trace(t: ProofTrace, tail_window: int) -> TraceClassification:
    """Compare the observed decision tail with the eventual-odd-only pattern.

    ``EVENTUALLY_ODD_ONLY`` with ``tail_start = K`` means step K was the last
    even-half decision and at least ``tail_window`` odd-half decisions follow
    it up to the end of the trace.
    """
    if tail_window < 1:
        raise ValueError("tail_window must be >= 1")
    evens = [st.step_index for st in t.steps if st.decision is Decision.PROVEN_EVEN]
    last_even = evens[-1] if evens else None
    candidate = candidate_from_trace(t)
    caveat = TRUNCATION_CAVEAT.format(n=len(t.steps))
    if t.termination.kind in (TerminationKind.CLOSED_BOTH, TerminationKind.STUCK, TerminationKind.ABORTED):
        return TraceClassification(last_even, candidate, Verdict.CLOSED_OR_STUCK, caveat)
    K = last_even or 0
    if len(t.steps) - K >= tail_window:
        return TraceClassification(last_even, candidate, Verdict.EVENTUALLY_ODD_ONLY, caveat, K)
    return TraceClassification(last_even, candidate, Verdict.EVEN_RECURRING_SO_FAR, caveat)


def check_chain(t: ProofTrace) -> list[str]:
    """Structural problems of a trace, empty when the step chain is sound."""
    problems = []
    parent = t.initial_class
    for i, st in enumerate(t.steps, start=1):
        if st.step_index != i:
            problems.append(f"step {i}: step_index is {st.step_index}")
        if st.divisor_exponent != parent.modulus_exponent:
            problems.append(f"step {i}: divisor_exponent {st.divisor_exponent} != {parent.modulus_exponent}")
        even, odd = split(parent)
        expected = (even, odd) if st.decision is Decision.PROVEN_EVEN else (odd, even)
        if (st.proven_class, st.unsolved_class) != expected:
            problems.append(f"step {i}: classes do not match a {st.decision.value} split of {parent}")
        parent = st.unsolved_class
    return problems


def trace_to_json(t: ProofTrace) -> dict[str, Any]:
    return {
        "format": TRACE_FORMAT,
        "step_convention": STEP_CONVENTION,
        "initial_class": t.initial_class.to_json(),
        "bound": None if t.bound is None else str(t.bound),
        "steps": [st.to_json() for st in t.steps],
        "termination": t.termination.to_json(),
        "candidate_prefix": str(candidate_from_trace(t)),
        "truncated": t.truncated,
    }


def trace_from_json(obj: dict[str, Any]) -> ProofTrace:
    """Parse a trace object.

    ``candidate_prefix`` and ``truncated`` are derived fields; a file whose
    stored values disagree with its steps is rejected.
    """
    if obj.get("format") != TRACE_FORMAT:
        raise TraceFormatError(f"unknown trace format {obj.get('format')!r}")
    try:
        bound = obj.get("bound")
        t = ProofTrace(
            initial_class=ResidueClass.from_json(obj["initial_class"]),
            steps=tuple(StepRecord.from_json(s) for s in obj["steps"]),
            termination=Termination.from_json(obj["termination"]),
            bound=None if bound is None else int(bound),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TraceFormatError):
            raise
        raise TraceFormatError(f"malformed trace: {exc}") from exc
    stored = obj.get("candidate_prefix")
    if stored != str(candidate_from_trace(t)):
        raise TraceFormatError(f"candidate_prefix {stored!r} disagrees with the recorded steps")
    if obj.get("truncated") is not t.truncated:
        raise TraceFormatError("truncated flag disagrees with termination")
    return t


def dumps_trace(t: ProofTrace) -> str:
    return json.dumps(trace_to_json(t), indent=2) + "\n"


def loads_trace(text: str) -> ProofTrace:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"not JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise TraceFormatError("trace must be a JSON object")
    return trace_from_json(obj)


def write_trace(t: ProofTrace, path: str | Path) -> None:
    Path(path).write_text(dumps_trace(t), encoding="utf-8")


def read_trace(path: str | Path) -> ProofTrace:
    return loads_trace(Path(path).read_text(encoding="utf-8"))
