"""Propositions on the naturals and the provers built from them.

A proposition answers point queries with a three-valued :class:`Truth` and,
for the synthetic families here, class queries with a three-valued
:class:`ClassVerdict`. ``exact_prover`` turns the class query into a step
prover for :func:`dichotomy.engine.run_dichotomy`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

from .engine import Decision, ProverError, StepProver
from .residue import ResidueClass, membership


class TruthKind(Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Truth:
    kind: TruthKind
    # work spent before giving up; only meaningful for UNKNOWN
    budget_spent: int = 0

    def __str__(self) -> str:
        if self.kind is TruthKind.UNKNOWN:
            return f"unknown(budget_spent={self.budget_spent})"
        return self.kind.value


HOLDS = Truth(TruthKind.HOLDS)
FAILS = Truth(TruthKind.FAILS)


def unknown(budget_spent: int) -> Truth:
    return Truth(TruthKind.UNKNOWN, budget_spent)


class ClassVerdict(Enum):
    ALL_HOLD = "all-hold"
    SOME_FAILS = "some-fails"
    UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class Proposition:
    name: str
    eval: Callable[[int], Truth]
    holds_on_class: Callable[[ResidueClass], ClassVerdict] | None = None
    # structural descriptions, kept so pull_back can transport the class query
    holes: frozenset[int] | None = None
    period: tuple[int, tuple[bool, ...]] | None = None

    def __call__(self, n: int) -> Truth:
        return self.eval(n)


def multi_hole(holes: Iterable[int], name: str | None = None) -> Proposition:
    hole_set = frozenset(holes)
    if any(h < 0 for h in hole_set):
        raise ValueError("holes must be non-negative")

    def eval_(n: int) -> Truth:
        return FAILS if n in hole_set else HOLDS

    def on_class(c: ResidueClass) -> ClassVerdict:
        if any(membership(h, c) for h in hole_set):
            return ClassVerdict.SOME_FAILS
        return ClassVerdict.ALL_HOLD

    if name is None:
        name = "multi-hole:" + ",".join(str(h) for h in sorted(hole_set))
    return Proposition(name, eval_, on_class, holes=hole_set)


def single_hole(m: int) -> Proposition:
    return multi_hole([m], name=f"single-hole:{m}")


def periodic(p_exponent: int, table: Sequence[bool]) -> Proposition:
    """``P(n) = table[n mod 2**p]``.

    The class query is only answered once the class fixes ``n mod 2**p``.
    """
    table = tuple(bool(x) for x in table)
    if p_exponent < 0 or len(table) != 1 << p_exponent:
        raise ValueError(f"table must have 2**{p_exponent} entries, got {len(table)}")
    if not any(table):
        raise ValueError("an all-false table refutes every number; nothing to prove")
    mask = (1 << p_exponent) - 1

    def eval_(n: int) -> Truth:
        return HOLDS if table[n & mask] else FAILS

    def on_class(c: ResidueClass) -> ClassVerdict:
        if c.modulus_exponent < p_exponent:
            return ClassVerdict.UNDECIDABLE
        return ClassVerdict.ALL_HOLD if table[c.remainder & mask] else ClassVerdict.SOME_FAILS

    bits = "".join("1" if x else "0" for x in table)
    return Proposition(f"periodic:{p_exponent}:{bits}", eval_, on_class, period=(p_exponent, table))


def exact_prover(P: Proposition) -> StepProver:
    if P.holds_on_class is None:
        raise ValueError(f"{P.name} has no class-level decision procedure")
    query = P.holds_on_class

    def prove(step: int, even: ResidueClass, odd: ResidueClass, proven: Sequence[ResidueClass]) -> Decision:
        even_ok = query(even) is ClassVerdict.ALL_HOLD
        odd_ok = query(odd) is ClassVerdict.ALL_HOLD
        if even_ok and odd_ok:
            return Decision.PROVEN_BOTH
        if even_ok:
            return Decision.PROVEN_EVEN
        if odd_ok:
            return Decision.PROVEN_ODD
        return Decision.STUCK

    return prove


def scripted_prover(decisions: Sequence[Decision]) -> StepProver:
    """Replay a fixed list of decisions; raises :class:`ProverError` past its end."""
    script = tuple(decisions)

    def prove(step: int, even: ResidueClass, odd: ResidueClass, proven: Sequence[ResidueClass]) -> Decision:
        if step > len(script):
            raise ProverError(f"script has only {len(script)} decisions")
        return script[step - 1]

    return prove


@dataclass(frozen=True)
class AffineMap:
    """``n -> a*n + b`` with ``a >= 1``; injective on the naturals."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a < 1 or self.b < 0:
            raise ValueError(f"affine map needs a >= 1 and b >= 0, got a={self.a}, b={self.b}")

    def __call__(self, n: int) -> int:
        return self.a * n + self.b

    def preimage(self, y: int) -> int | None:
        q, rem = divmod(y - self.b, self.a)
        return q if y >= self.b and rem == 0 else None


def pull_back(P: Proposition, f: AffineMap, f_eval: Callable[[int], int] | None = None) -> Proposition:
    """The proposition ``n -> P(f(n))``.

    Class queries survive for hole and periodic propositions: holes pull back
    to their preimages, and ``a*n + b mod 2**p`` depends only on ``n mod 2**p``.
    """
    fe = f if f_eval is None else f_eval
    name = f"pullback:affine:{f.a}:{f.b}:{P.name}"

    def eval_(n: int) -> Truth:
        return P.eval(fe(n))

    if P.holes is not None:
        pre = (f.preimage(h) for h in P.holes)
        inner = multi_hole((x for x in pre if x is not None))
        return Proposition(name, eval_, inner.holds_on_class, holes=inner.holes)
    if P.period is not None:
        p, table = P.period
        mask = (1 << p) - 1
        pulled = tuple(table[(f.a * i + f.b) & mask] for i in range(1 << p))
        if any(pulled):
            inner = periodic(p, pulled)
            return Proposition(name, eval_, inner.holds_on_class, period=inner.period)
        return Proposition(name, eval_, lambda c: ClassVerdict.SOME_FAILS)
    return Proposition(name, eval_)


def parse_proposition(spec: str) -> Proposition:
    """Build a proposition from its CLI spelling.

    ``single-hole:M``, ``multi-hole:M1,M2,...`` (empty list allowed),
    ``periodic:P:BITS``, ``collatz:BUDGET``, ``pullback:affine:A:B:<inner>``.
    """
    family, _, rest = spec.partition(":")
    try:
        if family == "single-hole":
            return single_hole(_nat(rest))
        if family == "multi-hole":
            return multi_hole(_nat(x) for x in rest.split(",") if x.strip())
        if family == "periodic":
            p, _, bits = rest.partition(":")
            if not bits or set(bits) - {"0", "1"}:
                raise ValueError(f"periodic table must be a bitstring, got {bits!r}")
            return periodic(_nat(p), [c == "1" for c in bits])
        if family == "collatz":
            from .collatz import collatz_proposition

            return collatz_proposition(_nat(rest))
        if family == "pullback":
            kind, a, b, inner = rest.split(":", 3)
            if kind != "affine":
                raise ValueError(f"unsupported map kind {kind!r}")
            return pull_back(parse_proposition(inner), AffineMap(_nat(a), _nat(b)))
    except ValueError as exc:
        raise ValueError(f"bad proposition spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown proposition family in {spec!r}")


def _nat(text: str) -> int:
    text = text.strip()
    if not text.isdigit():
        raise ValueError(f"expected a non-negative integer, got {text!r}")
    return int(text)
