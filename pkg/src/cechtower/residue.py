"""Exact arithmetic in the finite local rings Z/p^s.

Every value is kept as a canonical representative in [0, p^s).  Elements of
different rings never mix silently; combining them raises
``ModulusMismatchError``.  The arbitrary-precision integer backing means the
contract holds for any prime power, not just word-sized ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

INFINITY = math.inf


class NotAUnitError(ValueError):
    """Raised when inverting an element divisible by p."""


class ModulusMismatchError(ValueError):
    """Raised when elements over different moduli are combined."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True, order=True)
class Modulus:
    """A prime power p**s, p prime, s >= 1."""

    p: int
    s: int

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.s < 1:
            raise ValueError(f"s = {self.s} must be >= 1")

    @property
    def q(self) -> int:
        return self.p ** self.s

    def element(self, value: int) -> "ResidueElement":
        return ResidueElement(value % self.q, self)

    def zero(self) -> "ResidueElement":
        return self.element(0)

    def one(self) -> "ResidueElement":
        return self.element(1)

    def valuation_of(self, value: int) -> int | float:
        """Largest v with p^v dividing value (as a canonical representative).

        The zero element gets the distinguished value INFINITY so that pivot
        searches always prefer a nonzero entry.
        """
        v = value % self.q
        if v == 0:
            return INFINITY
        e = 0
        while v % self.p == 0:
            v //= self.p
            e += 1
        return e

    def unit_inverse_of(self, value: int) -> int:
        v = value % self.q
        if v % self.p == 0:
            raise NotAUnitError(f"{v} is not a unit in Z/{self.p}^{self.s}")
        return pow(v, -1, self.q)

    def lower(self, s_new: int) -> "Modulus":
        if not 1 <= s_new <= self.s:
            raise ValueError(f"target exponent {s_new} not in [1, {self.s}]")
        return Modulus(self.p, s_new)

    def __str__(self) -> str:
        return f"Z/{self.p}^{self.s}"


@dataclass(frozen=True)
class ResidueElement:
    """An element of Z/p^s, stored as its canonical representative."""

    value: int
    modulus: Modulus

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.modulus.q:
            object.__setattr__(self, "value", self.value % self.modulus.q)

    def _check(self, other: "ResidueElement") -> None:
        if self.modulus != other.modulus:
            raise ModulusMismatchError(
                f"cannot combine elements of {self.modulus} and {other.modulus}"
            )

    def __add__(self, other: "ResidueElement") -> "ResidueElement":
        self._check(other)
        return ResidueElement((self.value + other.value) % self.modulus.q, self.modulus)

    def __sub__(self, other: "ResidueElement") -> "ResidueElement":
        self._check(other)
        return ResidueElement((self.value - other.value) % self.modulus.q, self.modulus)

    def __mul__(self, other: "ResidueElement") -> "ResidueElement":
        self._check(other)
        return ResidueElement((self.value * other.value) % self.modulus.q, self.modulus)

    def __neg__(self) -> "ResidueElement":
        return ResidueElement((-self.value) % self.modulus.q, self.modulus)

    def is_zero(self) -> bool:
        return self.value == 0

    def is_unit(self) -> bool:
        return self.value % self.modulus.p != 0

    @property
    def valuation(self) -> int | float:
        return self.modulus.valuation_of(self.value)

    def unit_inverse(self) -> "ResidueElement":
        return ResidueElement(self.modulus.unit_inverse_of(self.value), self.modulus)

    def reduce_to(self, s_new: int) -> "ResidueElement":
        m = self.modulus.lower(s_new)
        return ResidueElement(self.value % m.q, m)

    def lift_to(self, s_new: int) -> "ResidueElement":
        """Canonical lift to Z/p^{s_new}, s_new >= s (representative unchanged)."""
        if s_new < self.modulus.s:
            raise ValueError("lift target must not be smaller")
        return ResidueElement(self.value, Modulus(self.modulus.p, s_new))

    def __str__(self) -> str:
        return f"{self.value} ({self.modulus})"


def valuation(x: ResidueElement) -> int | float:
    return x.valuation


def unit_inverse(x: ResidueElement) -> ResidueElement:
    return x.unit_inverse()


def reduce(x: ResidueElement, s_new: int) -> ResidueElement:
    return x.reduce_to(s_new)


def lift(x: ResidueElement, s_new: int) -> ResidueElement:
    return x.lift_to(s_new)
