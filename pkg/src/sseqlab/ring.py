"""Coefficient rings: Z localized at p, the field F_p, and Z with a set of
primes inverted.

Scalars are `fractions.Fraction` values whose denominators are units in the
ring at hand.  The ring object decides what counts as a unit, how to measure
pivots, and how to canonicalize the diagonal entries produced by Smith normal
form (orders are stored as pure p-powers over Z_(p)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def padic_valuation(x, p: int) -> int | None:
    """p-adic valuation; None stands for +infinity (x == 0).

    Accepts ints, Fractions, or any rational with numerator/denominator.
    """
    if x == 0:
        return None
    num = abs(int(x.numerator)) if hasattr(x, "numerator") else abs(int(x))
    den = int(x.denominator) if hasattr(x, "denominator") else 1
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class CoefficientRing:
    """One of Z_(p) (kind="local"), F_p (kind="field"), Z[1/S] (kind="invert")."""

    kind: str
    p: int = 0
    inverted: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kind in ("local", "field"):
            if not _is_prime(self.p):
                raise ValueError(f"p = {self.p} is not prime")
        elif self.kind == "invert":
            if not self.inverted:
                raise ValueError("Z_invert needs a nonempty set of primes")
            for q in self.inverted:
                if not _is_prime(q):
                    raise ValueError(f"{q} is not prime")
        else:
            raise ValueError(f"unknown ring kind {self.kind!r}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def local(p: int) -> "CoefficientRing":
        return CoefficientRing("local", p=p)

    @staticmethod
    def prime_field(p: int) -> "CoefficientRing":
        return CoefficientRing("field", p=p)

    @staticmethod
    def invert(primes) -> "CoefficientRing":
        return CoefficientRing("invert", inverted=frozenset(primes))

    # -- scalar predicates -------------------------------------------------

    def contains(self, x) -> bool:
        den = int(x.denominator) if hasattr(x, "denominator") else 1
        if self.kind in ("local", "field"):
            return den % self.p != 0
        rest = den
        for q in self.inverted:
            while rest % q == 0:
                rest //= q
        return rest == 1

    def is_unit(self, x) -> bool:
        if x == 0:
            return False
        if not self.contains(x):
            raise ValueError(f"{x} is not a scalar of {self}")
        num = int(x.numerator) if hasattr(x, "numerator") else int(x)
        if self.kind in ("local", "field"):
            return num % self.p != 0
        rest = abs(num)
        for q in self.inverted:
            while rest % q == 0:
                rest //= q
        return rest == 1

    def reduce(self, x) -> Fraction:
        """Canonical scalar: mod-p representative in field mode, x otherwise."""
        if not isinstance(x, Fraction):
            x = Fraction(int(x.numerator), int(x.denominator)) if hasattr(x, "numerator") \
                else Fraction(x)
        if self.kind != "field":
            return x
        p = self.p
        den = x.denominator % p
        num = x.numerator % p
        return Fraction((num * pow(den, -1, p)) % p)

    def is_zero(self, x) -> bool:
        if self.kind == "field":
            return self.reduce(x) == 0
        return x == 0

    # -- pivots and canonical orders ----------------------------------------

    def pivot_measure(self, x) -> int:
        """Smaller is a better SNF pivot; units measure 0."""
        if self.kind in ("local", "field"):
            v = padic_valuation(x, self.p)
            assert v is not None
            return v
        num = abs(int(x.numerator)) if hasattr(x, "numerator") else abs(int(x))
        for q in self.inverted:
            while num % q == 0:
                num //= q
        return num.bit_length()

    def divides(self, a: Fraction, b: Fraction) -> bool:
        """a | b in the ring (a nonzero)."""
        if self.is_zero(b):
            return True
        if self.is_zero(a):
            return False
        if self.kind in ("local", "field"):
            va = padic_valuation(a, self.p)
            vb = padic_valuation(b, self.p)
            return va <= vb
        q = Fraction(b) / Fraction(a)
        return self.contains(q)

    def canonical_order(self, x) -> int:
        """Strip unit factors from a nonzero SNF diagonal entry.

        Over Z_(p) the result is p^v; over Z[1/S] the non-S part of the
        numerator; in field mode any non-unit entry is 0 (and units give 1).
        """
        if self.is_zero(x):
            return 0
        if self.kind == "field":
            return 1
        if self.kind == "local":
            v = padic_valuation(x, self.p)
            return self.p**v
        num = abs(int(x.numerator)) if hasattr(x, "numerator") else abs(int(x))
        for q in self.inverted:
            while num % q == 0:
                num //= q
        return num

    def torsion_exponent_bound(self) -> int | None:
        return None

    def __str__(self):
        if self.kind == "local":
            return f"Z_({self.p})"
        if self.kind == "field":
            return f"F_{self.p}"
        return "Z[" + ",".join(f"1/{q}" for q in sorted(self.inverted)) + "]"


ZERO = Fraction(0)
ONE = Fraction(1)
