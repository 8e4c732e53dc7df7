"""Brute-force ground truth for dichotomy traces.

Everything here works on explicitly enumerated integers ``0 .. N-1`` and
re-derives membership with plain ``%`` and ``//``; residue-class arithmetic
from :mod:`dichotomy.residue` is used only to read fields off a trace and to
package a reference trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .engine import (
    Decision,
    ProofTrace,
    StepRecord,
    Termination,
    TerminationKind,
    candidate_from_trace,
)
from .props import ClassVerdict, Proposition, TruthKind
from .residue import ResidueClass

MAX_BOUND = 1 << 24


class AbstractionError(RuntimeError):
    """An enumerated unsolved set is not a residue class prefix."""


def _in_class(n: np.ndarray, k: int, r: int) -> np.ndarray:
    if k >= 62:
        # every n < 2**24 is its own residue modulo 2**k
        return n == r if r < (1 << 62) else np.zeros(n.shape, dtype=bool)
    return np.remainder(n, 1 << k) == r


@dataclass
class CrossCheckReport:
    bound: int
    # (|U_s ∩ [0,N)|, |S_s ∩ [0,N)|) for s = 0..steps
    counts: list[tuple[int, int]] = field(default_factory=list)
    # (n, expected location, actual location)
    mismatches: list[tuple[int, str, str]] = field(default_factory=list)
    # (n, "fails" | "unknown")
    solved_violations: list[tuple[int, str]] = field(default_factory=list)
    candidate_agreement: bool = True
    structural: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.mismatches or self.solved_violations or self.structural) and self.candidate_agreement

    def to_json(self, limit: int = 50) -> dict[str, Any]:
        return {
            "bound": str(self.bound),
            "ok": self.ok,
            "counts": [{"step": s, "unsolved": str(u), "solved": str(v)} for s, (u, v) in enumerate(self.counts)],
            "mismatch_count": len(self.mismatches),
            "mismatches": [{"n": str(n), "expected": e, "actual": a} for n, e, a in self.mismatches[:limit]],
            "solved_violation_count": len(self.solved_violations),
            "solved_violations": [{"n": str(n), "tag": tag} for n, tag in self.solved_violations[:limit]],
            "candidate_agreement": self.candidate_agreement,
            "structural": self.structural,
        }


def cross_check(t: ProofTrace, P: Proposition | None, N: int, max_mismatches: int = 1000) -> CrossCheckReport:
    """Replay ``t`` on every ``n < N``.

    At step ``s`` a number still unsolved must land in the proven class when
    its quotient by ``2**e`` (``e`` the step's divisor exponent) has the
    parity the step claims to have proven, and in the unsolved class
    otherwise; numbers already solved or outside ``U_0`` must land in
    neither. With ``P`` given, every solved number is evaluated.
    """
    if not 1 <= N <= MAX_BOUND:
        raise ValueError(f"N must be in [1, 2**24], got {N}")
    rep = CrossCheckReport(N)
    n = np.arange(N, dtype=np.int64)

    k0, r0 = t.initial_class.modulus_exponent, t.initial_class.remainder
    unsolved = _in_class(n, k0, r0)
    if t.bound is not None:
        unsolved &= n < t.bound
    solved = np.zeros(N, dtype=bool)
    rep.counts.append((int(unsolved.sum()), 0))
    expected_exp = k0

    for s, st in enumerate(t.steps, start=1):
        if st.step_index != s:
            rep.structural.append(f"step {s}: step_index {st.step_index}")
        if st.divisor_exponent != expected_exp:
            rep.structural.append(f"step {s}: divisor_exponent {st.divisor_exponent}, expected {expected_exp}")
        if st.decision not in (Decision.PROVEN_EVEN, Decision.PROVEN_ODD):
            rep.structural.append(f"step {s}: decision {st.decision.value} cannot complete a step")
        e = expected_exp
        bit = (n // (1 << e)) % 2 if e < 62 else np.zeros(N, dtype=np.int64)
        want_bit = 0 if st.decision is Decision.PROVEN_EVEN else 1
        exp_proven = unsolved & (bit == want_bit)
        exp_unsolved = unsolved & (bit != want_bit)

        in_p = _in_class(n, st.proven_class.modulus_exponent, st.proven_class.remainder)
        in_u = _in_class(n, st.unsolved_class.modulus_exponent, st.unsolved_class.remainder)
        if t.bound is not None:
            below = n < t.bound
            in_p &= below
            in_u &= below
        # classes are infinite; only the part inside U_{s-1} counts, the rest must be empty
        act_proven = in_p
        act_unsolved = in_u
        bad = (act_proven != exp_proven) | (act_unsolved != exp_unsolved)
        for x in np.flatnonzero(bad)[: max(0, max_mismatches - len(rep.mismatches))]:
            x = int(x)
            rep.mismatches.append(
                (
                    x,
                    _location(exp_proven[x], exp_unsolved[x], s),
                    _location(act_proven[x], act_unsolved[x], s),
                )
            )
        if bad.any() and len(rep.mismatches) >= max_mismatches:
            rep.structural.append(f"mismatch list truncated at {max_mismatches}")

        newly = act_proven & ~solved
        if P is not None:
            for x in np.flatnonzero(newly & exp_proven):
                truth = P.eval(int(x))
                if truth.kind is not TruthKind.HOLDS:
                    rep.solved_violations.append((int(x), truth.kind.value))
        solved |= act_proven
        unsolved = act_unsolved
        rep.counts.append((int(unsolved.sum()), int(solved.sum())))
        expected_exp = e + 1

    s = len(t.steps)
    width = k0 + s
    candidate = candidate_from_trace(t)
    if width < 62 and (1 << width) <= N:
        prefix = np.flatnonzero(unsolved[: 1 << width])
        rep.candidate_agreement = prefix.tolist() == [candidate]
    else:
        # prefix longer than the enumeration: check the candidate arithmetically
        rep.candidate_agreement = candidate < (1 << width) and all(
            candidate % (1 << st.unsolved_class.modulus_exponent) == st.unsolved_class.remainder for st in t.steps
        )
    return rep


def _location(p: bool, u: bool, s: int) -> str:
    if p and u:
        return f"both@{s}"
    if p:
        return f"solved@{s}"
    if u:
        return f"unsolved@{s}"
    return f"neither@{s}"


def _abstract(members: np.ndarray, stride: int, N: int) -> ResidueClass:
    """Recover the residue class whose members below ``N`` are exactly ``members``."""
    if members.size == 0:
        raise AbstractionError("empty unsolved set")
    r = int(members[0])
    if r >= stride:
        raise AbstractionError(f"smallest member {r} not below stride {stride}")
    expected = np.arange(r, N, stride, dtype=np.int64)
    if expected.shape != members.shape or not np.array_equal(expected, members):
        raise AbstractionError(f"set is not {r} + {stride}*a below {N}")
    k = stride.bit_length() - 1
    return ResidueClass(k, r)


def simulate_reference(P: Proposition, max_steps: int, N: int) -> ProofTrace:
    """Run the step loop on explicit subsets of ``[0, N)``.

    Halves are formed by the parity of ``n // 2**(s-1)`` on the enumerated
    set, abstracted back to residue classes, and handed to the proposition's
    class query. The result must equal the engine's trace for the same input.
    """
    if P.holds_on_class is None:
        raise ValueError(f"{P.name} has no class-level decision procedure")
    if N < (1 << max_steps) or N > MAX_BOUND:
        raise ValueError("need 2**max_steps <= N <= 2**24")
    unsolved = np.arange(N, dtype=np.int64)
    stride = 1
    steps: list[StepRecord] = []
    termination = Termination(TerminationKind.TRUNCATED, max_steps)
    for s in range(1, max_steps + 1):
        q = unsolved // (1 << (s - 1))
        even_set, odd_set = unsolved[q % 2 == 0], unsolved[q % 2 == 1]
        even = _abstract(even_set, 2 * stride, N)
        odd = _abstract(odd_set, 2 * stride, N)
        even_ok = P.holds_on_class(even) is ClassVerdict.ALL_HOLD
        odd_ok = P.holds_on_class(odd) is ClassVerdict.ALL_HOLD
        if even_ok and odd_ok:
            termination = Termination(TerminationKind.CLOSED_BOTH, s)
            break
        if not (even_ok or odd_ok):
            termination = Termination(TerminationKind.STUCK, s)
            break
        if even_ok:
            steps.append(StepRecord(s, s - 1, Decision.PROVEN_EVEN, even, odd))
            unsolved = odd_set
        else:
            steps.append(StepRecord(s, s - 1, Decision.PROVEN_ODD, odd, even))
            unsolved = even_set
        stride *= 2
    return ProofTrace(ResidueClass(0, 0), tuple(steps), termination)
