"""Trace algebra of the rank-8 module over Z_(2)[a1, a3].

The ring Gamma' = A'[s,t] modulo the two cubic relations is free of rank 8
over A' = Z_(2)[a1, a3] on the basis (1, s, s^2, s^3, t, st, s^2 t, s^3 t).
Multiplication by any element is A'-linear, and its trace recovers the
algebraic transfer; `verify_transfer_images` checks the full trace table and
the two modular-form identities that feed the permanent-cycle argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .hopf import attach_module_normalizer
from .poly import GradedRing, Poly

BASIS = (
    {},
    {"s": 1},
    {"s": 2},
    {"s": 3},
    {"t": 1},
    {"s": 1, "t": 1},
    {"s": 2, "t": 1},
    {"s": 3, "t": 1},
)
BASIS_NAMES = ("1", "s", "s^2", "s^3", "t", "s*t", "s^2*t", "s^3*t")


def _gamma_prime_ring() -> GradedRing:
    ring = GradedRing(("a1", "a3", "s", "t"), (2, 6, 2, 6))
    rel1 = {}
    for mono, c in ((((\
        "s", 1), ("t", 1)), 6), ((("a1", 1), ("s", 3)), -1),
            ((("a1", 1), ("t", 1)), 3), ((("a3", 1), ("s", 1)), 3)):
        e = [0] * 4
        for name, k in mono:
            e[ring.index[name]] = k
        rel1[tuple(e)] = Fraction(c)
    rel2 = {}
    for mono, c in (
        ((("s", 6),), Fraction(1, 27)),
        ((("a1", 1), ("s", 5)), Fraction(1, 9)),
        ((("a1", 1), ("s", 2), ("t", 1)), Fraction(-1, 3)),
        ((("a1", 2), ("s", 4)), Fraction(1, 9)),
        ((("a1", 2), ("s", 1), ("t", 1)), Fraction(-1, 3)),
        ((("a1", 3), ("s", 3)), Fraction(1, 27)),
        ((("a3", 1), ("t", 1)), Fraction(-1)),
    ):
        e = [0] * 4
        for name, k in mono:
            e[ring.index[name]] = k
        rel2[tuple(e)] = Fraction(c)
    attach_module_normalizer(
        ring,
        module_vars=("s", "t"),
        caps={"s": 3, "t": 1},
        relations=[({"s": 4}, rel1), ({"t": 2}, rel2)],
    )
    return ring


_RING = _gamma_prime_ring()
_A_RING = GradedRing(("a1", "a3"), (2, 6))


def a_poly(spec: dict) -> Poly:
    """A'-polynomial from {(i, j): coeff} exponent pairs for (a1, a3)."""
    terms = {}
    for (i, j), c in spec.items():
        c = Fraction(c)
        if c:
            terms[(i, j)] = c
    return Poly(_A_RING, terms)


@dataclass(frozen=True)
class GammaPrimeElement:
    """Coordinates on the ordered basis (1, s, s^2, s^3, t, st, s^2 t, s^3 t)."""

    coords: tuple  # 8 A'-polynomials

    def __add__(self, other):
        return GammaPrimeElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __str__(self):
        parts = []
        for name, c in zip(BASIS_NAMES, self.coords):
            if not c.is_zero():
                parts.append(f"({c})*{name}")
        return " + ".join(parts) if parts else "0"


def normalize(expr: Poly | dict) -> GammaPrimeElement:
    """Normal form of a polynomial in a1, a3, s, t as a basis coordinate vector."""
    if isinstance(expr, dict):
        expr = Poly(_RING, {m: Fraction(c) for m, c in expr.items() if c})
    if expr.ring is not _RING:
        expr = _rebind(expr)
    nf = _RING.normal_form(expr)
    coords = [dict() for _ in range(8)]
    basis_index = {}
    for k, b in enumerate(BASIS):
        e = [0] * 4
        for name, v in b.items():
            e[_RING.index[name]] = v
        basis_index[(e[2], e[3])] = k
    for mono, c in nf.terms.items():
        i_a1, i_a3, e_s, e_t = mono
        k = basis_index.get((e_s, e_t))
        if k is None:
            raise AssertionError(f"monomial {mono} escaped the rank-8 basis")
        key = (i_a1, i_a3)
        coords[k][key] = coords[k].get(key, Fraction(0)) + c
    return GammaPrimeElement(tuple(
        Poly(_A_RING, {m: c for m, c in d.items() if c}) for d in coords
    ))


def _rebind(p: Poly) -> Poly:
    terms = {}
    for m, c in p.terms.items():
        e = [0] * 4
        for name, k in zip(p.ring.names, m):
            if k:
                e[_RING.index[name]] = k
        terms[tuple(e)] = c
    return Poly(_RING, terms)


def gamma_poly(spec: dict) -> Poly:
    """Polynomial from {(i, j, k, l): coeff} exponents for (a1, a3, s, t)."""
    return Poly(_RING, {m: Fraction(c) for m, c in spec.items() if c})


ETA_R_A1 = gamma_poly({(1, 0, 0, 0): 1, (0, 0, 1, 0): 2})
ETA_R_A3 = gamma_poly({
    (0, 1, 0, 0): 1,
    (1, 0, 2, 0): Fraction(1, 3),
    (2, 0, 1, 0): Fraction(1, 3),
    (0, 0, 0, 1): 2,
})


def multiplication_matrix(x) -> list:
    """8x8 matrix (columns = images of basis elements) of multiplication by x."""
    if isinstance(x, Poly):
        x = normalize(x)
    cols = []
    xp = _element_to_poly(x)
    for b in BASIS:
        col = normalize(xp * _RING.monomial(b))
        cols.append(col.coords)
    return cols


def _element_to_poly(x: GammaPrimeElement) -> Poly:
    out = _RING.zero()
    for c, b in zip(x.coords, BASIS):
        for (i, j), v in c.terms.items():
            out = out + _RING.monomial({"a1": i, "a3": j, **b}, v)
    return out


def trace(x) -> Poly:
    """Trace of multiplication by x on the rank-8 module; A'-linear in x."""
    cols = multiplication_matrix(x)
    out = _A_RING.zero()
    for k in range(8):
        out = out + cols[k][k]
    return out


C4 = a_poly({(4, 0): 1, (1, 1): -24})
C6 = a_poly({(6, 0): -1, (3, 1): 36, (0, 2): -216})

TRACE_TABLE = [
    ("Tr(1)", gamma_poly({(0, 0, 0, 0): 1}), a_poly({(0, 0): 8})),
    ("Tr(s)", gamma_poly({(0, 0, 1, 0): 1}), a_poly({(1, 0): -4})),
    ("Tr(s^2)", gamma_poly({(0, 0, 2, 0): 1}), a_poly({(2, 0): 2})),
    ("Tr(s^3)", gamma_poly({(0, 0, 3, 0): 1}), a_poly({(3, 0): -1})),
    ("Tr(t)", gamma_poly({(0, 0, 0, 1): 1}),
     a_poly({(3, 0): Fraction(1, 3), (0, 1): -4})),
    ("Tr(st)", gamma_poly({(0, 0, 1, 1): 1}), a_poly({(1, 1): -2})),
    ("Tr(s^2t)", gamma_poly({(0, 0, 2, 1): 1}),
     a_poly({(5, 0): Fraction(-1, 3), (2, 1): 9})),
    ("Tr(s^3t)", gamma_poly({(0, 0, 3, 1): 1}),
     a_poly({(6, 0): Fraction(1, 3), (3, 1): -7, (0, 2): -27})),
]


@dataclass
class TransferReport:
    rows: list  # (label, expected str, got str, ok)
    ok: bool

    def __str__(self):
        lines = []
        for label, expected, got, ok in self.rows:
            mark = "ok " if ok else "FAIL"
            lines.append(f"[{mark}] {label} = {got}" + ("" if ok else f"  (expected {expected})"))
        lines.append("transfer table: " + ("all identities hold" if self.ok else "MISMATCH"))
        return "\n".join(lines)


def verify_transfer_images() -> TransferReport:
    """Check every trace-table row and the 2c4 / 2c6 transfer identities."""
    rows = []
    for label, arg, expect in TRACE_TABLE:
        got = trace(arg)
        rows.append((label, str(expect), str(got), got.terms == expect.terms))
    # Tr(3 eta_R(a1 a3)) = 2 c4
    arg = (ETA_R_A1 * ETA_R_A3).scale(3)
    got = trace(arg)
    expect = C4.scale(2)
    rows.append(("Tr(3*etaR(a1*a3))", str(expect), str(got), got.terms == expect.terms))
    # Tr(-eta_R(a3^2)) is the unit multiple -1/27 of 2c6 (27 is a 2-local
    # unit), so 2c6 still lies in the transfer image; both normalizations are
    # pinned down here.
    arg = (ETA_R_A3 * ETA_R_A3).scale(-1)
    got = trace(arg)
    expect = C6.scale(Fraction(-2, 27))
    rows.append(("Tr(-etaR(a3^2))", str(expect), str(got), got.terms == expect.terms))
    got = trace((ETA_R_A3 * ETA_R_A3).scale(27))
    expect = C6.scale(2)
    rows.append(("Tr(27*etaR(a3^2))", str(expect), str(got), got.terms == expect.terms))
    # Tr(eta_R(a1)) = 0: both trace rows cancel
    got = trace(ETA_R_A1)
    rows.append(("Tr(etaR(a1))", "0", str(got), got.is_zero()))
    return TransferReport(rows, all(r[3] for r in rows))
