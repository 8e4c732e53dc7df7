"""Residue classes modulo powers of two.

A :class:`ResidueClass` ``(k, r)`` stands for the infinite set
``{r + 2**k * a : a >= 0}``. Only the power-of-two chain produced by
repeated quotient-parity splits is supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True, order=True)
class ResidueClass:
    modulus_exponent: int = 0
    remainder: int = 0

    def __post_init__(self) -> None:
        k, r = self.modulus_exponent, self.remainder
        if isinstance(k, bool) or not isinstance(k, int) or k < 0:
            raise ValueError(f"modulus exponent must be a non-negative int, got {k!r}")
        if isinstance(r, bool) or not isinstance(r, int) or r < 0:
            raise ValueError(f"remainder must be a non-negative int, got {r!r}")
        if r >> k:
            raise ValueError(f"remainder {r} is not canonical modulo 2**{k}")

    @classmethod
    def of(cls, n: int, k: int) -> ResidueClass:
        """The class of ``n`` modulo ``2**k`` (normalizing constructor)."""
        return cls(k, n % (1 << k))

    @property
    def modulus(self) -> int:
        return 1 << self.modulus_exponent

    def __contains__(self, n: int) -> bool:
        return membership(n, self)

    def split(self) -> tuple[ResidueClass, ResidueClass]:
        return split(self)

    def members(self, bound: int) -> list[int]:
        return enumerate_class(self, bound)

    def count_below(self, bound: int) -> int:
        """Number of members strictly below ``bound``."""
        if self.remainder >= bound:
            return 0
        return ((bound - 1 - self.remainder) >> self.modulus_exponent) + 1

    def to_json(self) -> dict[str, Any]:
        return {"modulus_exponent": self.modulus_exponent, "remainder": str(self.remainder)}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> ResidueClass:
        k = obj["modulus_exponent"]
        r = obj["remainder"]
        if not isinstance(r, str) or not r.isdigit():
            raise ValueError(f"remainder must be a decimal string, got {r!r}")
        return cls(int(k), int(r))

    def __str__(self) -> str:
        if self.modulus_exponent == 0:
            return "N"
        return f"{self.remainder} mod 2^{self.modulus_exponent}"


NATURALS = ResidueClass(0, 0)


def membership(n: int, c: ResidueClass) -> bool:
    if n < 0:
        return False
    return n & (c.modulus - 1) == c.remainder


def split(c: ResidueClass) -> tuple[ResidueClass, ResidueClass]:
    """Split ``c`` by the parity of ``n // 2**k``.

    Returns ``(even_child, odd_child)``; bit ``k`` of every member of the
    even child is 0, of the odd child 1.
    """
    k, r = c.modulus_exponent, c.remainder
    return ResidueClass(k + 1, r), ResidueClass(k + 1, r + (1 << k))


def enumerate_class(c: ResidueClass, bound: int) -> list[int]:
    return list(range(c.remainder, max(bound, c.remainder), c.modulus))
