"""Graded commutative polynomials over exact scalars, with relation rewriting.

Generators all have even internal degree in the presentations used here, so
no Koszul signs appear at this layer.  Monomials are exponent tuples over a
fixed generator list; a ring may carry rewrite rules (leading monomial ->
replacement) which `normal_form` applies to a fixed point under a step bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class NormalFormDivergence(Exception):
    """Rewriting exceeded the configured step bound."""


Mono = tuple  # exponent tuple aligned with GradedRing.names


@dataclass
class GradedRing:
    names: tuple
    degrees: tuple
    rewrites: list = field(default_factory=list)  # (lead: Mono, replacement: dict)
    step_bound: int = 10**6
    normalizer: object = None  # callable Poly -> Poly, overrides rewrite loop

    def __post_init__(self):
        self.names = tuple(self.names)
        self.degrees = tuple(self.degrees)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.nvars = len(self.names)

    # -- constructors --------------------------------------------------------

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {(0,) * self.nvars: Fraction(1)})

    def scalar(self, c) -> "Poly":
        c = Fraction(c)
        return Poly(self, {} if c == 0 else {(0,) * self.nvars: c})

    def gen(self, name: str, exp: int = 1) -> "Poly":
        e = [0] * self.nvars
        e[self.index[name]] = exp
        return Poly(self, {tuple(e): Fraction(1)})

    def monomial(self, exps: dict, coeff=1) -> "Poly":
        e = [0] * self.nvars
        for name, k in exps.items():
            e[self.index[name]] = k
        c = Fraction(coeff)
        return Poly(self, {} if c == 0 else {tuple(e): c})

    def mono_degree(self, m: Mono) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def mono_str(self, m: Mono) -> str:
        parts = []
        for name, e in zip(self.names, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def add_rewrite(self, lead: dict, replacement: "Poly"):
        e = [0] * self.nvars
        for name, k in lead.items():
            e[self.index[name]] = k
        lead_m = tuple(e)
        if self.mono_degree(lead_m) != replacement.degree_or_none():
            if not replacement.is_zero():
                raise ValueError("rewrite must preserve internal degree")
        self.rewrites.append((lead_m, dict(replacement.terms)))

    # -- normal form ---------------------------------------------------------

    def normal_form(self, p: "Poly") -> "Poly":
        if self.normalizer is not None:
            return self.normalizer(p)
        if not self.rewrites:
            return p
        terms = dict(p.terms)
        steps = 0
        changed = True
        while changed:
            changed = False
            for lead, repl in self.rewrites:
                hit = [m for m in terms if _divisible(m, lead)]
                for m in hit:
                    c = terms.pop(m)
                    rest = _mono_sub(m, lead)
                    for rm, rc in repl.items():
                        key = _mono_add(rest, rm)
                        nv = terms.get(key, Fraction(0)) + c * rc
                        if nv == 0:
                            terms.pop(key, None)
                        else:
                            terms[key] = nv
                    steps += 1
                    if steps > self.step_bound:
                        raise NormalFormDivergence(
                            f"rewriting exceeded {self.step_bound} steps"
                        )
                    changed = True
                if hit:
                    break
        return Poly(self, terms)


def _divisible(m: Mono, lead: Mono) -> bool:
    return all(a >= b for a, b in zip(m, lead))


def _mono_add(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def _mono_sub(a: Mono, b: Mono) -> Mono:
    return tuple(x - y for x, y in zip(a, b))


@dataclass
class Poly:
    ring: GradedRing
    terms: dict  # Mono -> Fraction, no zero values

    def is_zero(self) -> bool:
        return not self.terms

    def degree_or_none(self) -> int | None:
        """Internal degree when homogeneous nonzero, None for 0."""
        degs = {self.ring.mono_degree(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous polynomial: degrees {sorted(degs)}")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        try:
            self.degree_or_none()
            return True
        except ValueError:
            return False

    def __add__(self, other: "Poly") -> "Poly":
        terms = dict(self.terms)
        for m, c in other.terms.items():
            nv = terms.get(m, Fraction(0)) + c
            if nv == 0:
                terms.pop(m, None)
            else:
                terms[m] = nv
        return Poly(self.ring, terms)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + other.scale(-1)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly(self.ring, {})
        return Poly(self.ring, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = _mono_add(m1, m2)
                nv = terms.get(key, Fraction(0)) + c1 * c2
                if nv == 0:
                    terms.pop(key, None)
                else:
                    terms[key] = nv
        return self.ring.normal_form(Poly(self.ring, terms))

    def substitute(self, target: GradedRing, images: dict) -> "Poly":
        """Map into `target` sending each generator name to images[name]."""
        out = target.zero()
        for m, c in self.terms.items():
            term = target.scalar(c)
            for name, e in zip(self.ring.names, m):
                if e:
                    img = images[name]
                    for _ in range(e):
                        term = term * img
            out = out + term
        return target.normal_form(out)

    def coefficient(self, mono_exps: dict) -> Fraction:
        e = [0] * self.ring.nvars
        for name, k in mono_exps.items():
            e[self.ring.index[name]] = k
        return self.terms.get(tuple(e), Fraction(0))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            ms = self.ring.mono_str(m)
            if ms == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(ms)
            elif c == -1:
                parts.append(f"-{ms}")
            else:
                parts.append(f"{c}*{ms}")
        return " + ".join(parts).replace("+ -", "- ")

    __rmul__ = __mul__
