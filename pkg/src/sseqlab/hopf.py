"""Finitely presented graded Hopf algebroids.

A presentation carries the generators of A and of Gamma over A, relations as
rewrite rules on the Gamma polynomial ring, and the structure maps eta_R, psi
and epsilon as polynomial data.  Built-in presentations cover the rank-8
2-primary cubic algebroid, the 3-local cubic algebroid, and small truncated
polynomial Hopf algebras used as test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .poly import GradedRing, Poly
from .ring import CoefficientRing


@dataclass
class HopfAlgebroidPresentation:
    ring: CoefficientRing
    a_gens: list  # (name, degree)
    gamma_gens: list  # (name, degree)
    eta_r: dict  # a-gen name -> Poly in gamma_ring
    psi: dict  # gamma-gen name -> list of (Fraction, left exps dict, right exps dict)
    epsilon: dict = field(default_factory=dict)  # gamma-gen name -> scalar (default 0)
    relations: list = field(default_factory=list)  # (lead exps dict, replacement exps->coeff)
    step_bound: int = 10**6
    name: str = "hopf"

    def __post_init__(self):
        names = tuple(n for n, _ in self.a_gens) + tuple(n for n, _ in self.gamma_gens)
        degrees = tuple(d for _, d in self.a_gens) + tuple(d for _, d in self.gamma_gens)
        self.gamma_ring = GradedRing(names, degrees, step_bound=self.step_bound)
        self.a_ring = GradedRing(
            tuple(n for n, _ in self.a_gens), tuple(d for _, d in self.a_gens)
        )
        self.a_names = tuple(n for n, _ in self.a_gens)
        self.g_names = tuple(n for n, _ in self.gamma_gens)
        self._eta_cache = {}
        # rebind eta_R values into this presentation's gamma ring by name
        rebound = {}
        for aname, p in self.eta_r.items():
            terms = {}
            for m, c in p.terms.items():
                e = [0] * self.gamma_ring.nvars
                for name, k in zip(p.ring.names, m):
                    if k:
                        e[self.gamma_ring.index[name]] = k
                terms[tuple(e)] = c
            rebound[aname] = Poly(self.gamma_ring, terms)
        self.eta_r = rebound
        self._validate()

    def _exps(self, exps: dict):
        e = [0] * self.gamma_ring.nvars
        for k, v in exps.items():
            e[self.gamma_ring.index[k]] = v
        return tuple(e)

    def _validate(self):
        for name, deg in self.a_gens:
            img = self.eta_r[name]
            if img.degree_or_none() not in (None, deg):
                raise ValueError(f"eta_R({name}) is not homogeneous of degree {deg}")
            # epsilon(eta_R(a)) = a: all gamma-generators are augmented to 0 here,
            # so the check is that the gamma-free part of eta_R(a) equals a.
            const = self._gamma_free_part(img)
            expect = self.gamma_ring.gen(name)
            if const.terms != expect.terms:
                raise ValueError(f"epsilon . eta_R != id on {name}")
        for name, deg in self.gamma_gens:
            for c, le, re in self.psi[name]:
                dl = sum(self.gamma_ring.degrees[self.gamma_ring.index[k]] * v for k, v in le.items())
                dr = sum(self.gamma_ring.degrees[self.gamma_ring.index[k]] * v for k, v in re.items())
                if dl + dr != deg:
                    raise ValueError(f"psi({name}) term of wrong degree")

    def _gamma_free_part(self, p: Poly) -> Poly:
        na = len(self.a_names)
        terms = {}
        for m, c in p.terms.items():
            if all(e == 0 for e in m[na:]):
                terms[m] = c
        return Poly(self.gamma_ring, terms)

    # -- reduced-basis bookkeeping -------------------------------------------

    def gamma_caps(self) -> dict:
        """Exponent caps for reduced Gamma-basis monomials."""
        caps = {}
        norm = self.gamma_ring.normalizer
        if norm is not None:
            for i, c in norm.caps.items():
                caps[self.gamma_ring.names[i]] = c
            return caps
        na = len(self.a_names)
        for lead, _ in self.gamma_ring.rewrites:
            nz = [(i, e) for i, e in enumerate(lead) if e]
            if len(nz) == 1 and nz[0][0] >= na:
                i, e = nz[0]
                name = self.gamma_ring.names[i]
                caps[name] = min(caps.get(name, e - 1), e - 1)
        return caps

    def eta_r_poly(self, a_mono: tuple) -> Poly:
        """eta_R of an A-monomial (exponent tuple over a_names) in the Gamma ring."""
        key = tuple(a_mono)
        cached = self._eta_cache.get(key)
        if cached is not None:
            return cached
        out = self.gamma_ring.one()
        for name, e in zip(self.a_names, a_mono):
            for _ in range(e):
                out = out * self.eta_r[name]
        self._eta_cache[key] = out
        return out


# ---------------------------------------------------------------------------
# built-in presentations


def cubic_two_primary() -> HopfAlgebroidPresentation:
    """A' = Z_(2)[a1,a3], Gamma' = A'[s,t] modulo the two rank-8 relations."""
    ring = CoefficientRing.local(2)
    a_gens = [("a1", 2), ("a3", 6)]
    gamma_gens = [("s", 2), ("t", 6)]
    tmp = GradedRing(("a1", "a3", "s", "t"), (2, 6, 2, 6))

    def P(spec):
        out = tmp.zero()
        for exps, c in spec:
            out = out + tmp.monomial(exps, c)
        return out

    eta_r = {
        "a1": P([({"a1": 1}, 1), ({"s": 1}, 2)]),
        "a3": P([
            ({"a3": 1}, 1),
            ({"a1": 1, "s": 2}, Fraction(1, 3)),
            ({"a1": 2, "s": 1}, Fraction(1, 3)),
            ({"t": 1}, 2),
        ]),
    }
    # r = (s^2 + a1 s)/3 after imposing a2 = 0; psi(t) = t@1 + 1@t + s@r
    psi = {
        "s": [(Fraction(1), {"s": 1}, {}), (Fraction(1), {}, {"s": 1})],
        "t": [
            (Fraction(1), {"t": 1}, {}),
            (Fraction(1), {}, {"t": 1}),
            (Fraction(1, 3), {"s": 1}, {"s": 2}),
            (Fraction(1, 3), {"s": 1}, {"a1": 1, "s": 1}),
        ],
    }
    relations = [
        # s^4 = 6st - a1 s^3 + 3 a1 t + 3 a3 s
        ({"s": 4}, {(("s", 1), ("t", 1)): 6, (("a1", 1), ("s", 3)): -1,
                    (("a1", 1), ("t", 1)): 3, (("a3", 1), ("s", 1)): 3}),
        # t^2 = (s^6 + 3a1 s^5 - 9a1 s^2 t + 3a1^2 s^4 - 9a1^2 s t + a1^3 s^3 - 27 a3 t)/27
        ({"t": 2}, {(("s", 6),): Fraction(1, 27), (("a1", 1), ("s", 5)): Fraction(1, 9),
                    (("a1", 1), ("s", 2), ("t", 1)): Fraction(-1, 3),
                    (("a1", 2), ("s", 4)): Fraction(1, 9),
                    (("a1", 2), ("s", 1), ("t", 1)): Fraction(-1, 3),
                    (("a1", 3), ("s", 3)): Fraction(1, 27),
                    (("a3", 1), ("t", 1)): -1}),
    ]
    h = HopfAlgebroidPresentation(
        ring, a_gens, gamma_gens, eta_r, psi, relations=[], name="cubic-2primary"
    )
    attach_module_normalizer(
        h.gamma_ring,
        module_vars=("s", "t"),
        caps={"s": 3, "t": 1},
        relations=[(lead, _spec_to_dict(h.gamma_ring, repl)) for lead, repl in relations],
    )
    return h


def attach_module_normalizer(ring: GradedRing, module_vars, caps: dict, relations: list):
    """Install structure-constant normal forms; see freebasis for why."""
    from .freebasis import ModuleBasisNormalizer

    var_idx = [ring.index[n] for n in module_vars]
    cap_idx = {ring.index[n]: c for n, c in caps.items()}
    rel_idx = []
    for lead, repl in relations:
        e = [0] * ring.nvars
        for name, k in lead.items():
            e[ring.index[name]] = k
        rel_idx.append((tuple(e), repl))
    ring.normalizer = ModuleBasisNormalizer(ring, var_idx, cap_idx, rel_idx)


def _spec_to_dict(ring: GradedRing, spec: dict) -> dict:
    out = {}
    for mono, c in spec.items():
        e = [0] * ring.nvars
        for name, k in mono:
            e[ring.index[name]] = k
        out[tuple(e)] = Fraction(c)
    return out


def cubic_three_local() -> HopfAlgebroidPresentation:
    """A = Z_(3)[a2,a4,a6], Gamma = A[r]; the 3-local cubic algebroid."""
    ring = CoefficientRing.local(3)
    a_gens = [("a2", 4), ("a4", 8), ("a6", 12)]
    gamma_gens = [("r", 4)]
    tmp = GradedRing(("a2", "a4", "a6", "r"), (4, 8, 12, 4))
    eta_r = {
        "a2": tmp.monomial({"a2": 1}) + tmp.monomial({"r": 1}, 3),
        "a4": tmp.monomial({"a4": 1}) + tmp.monomial({"a2": 1, "r": 1}, 2)
        + tmp.monomial({"r": 2}, 3),
        "a6": tmp.monomial({"a6": 1}) + tmp.monomial({"a4": 1, "r": 1})
        + tmp.monomial({"a2": 1, "r": 2}) + tmp.monomial({"r": 3}),
    }
    psi = {"r": [(Fraction(1), {"r": 1}, {}), (Fraction(1), {}, {"r": 1})]}
    return HopfAlgebroidPresentation(ring, a_gens, gamma_gens, eta_r, psi, name="cubic-3local")


def exterior_toy(p: int = 2, degree: int = 2) -> HopfAlgebroidPresentation:
    """F_p exterior Hopf algebra on one primitive generator."""
    ring = CoefficientRing.prime_field(p)
    h = HopfAlgebroidPresentation(
        ring,
        [],
        [("x", degree)],
        {},
        {"x": [(Fraction(1), {"x": 1}, {}), (Fraction(1), {}, {"x": 1})]},
        name=f"exterior-F{p}",
    )
    h.gamma_ring.add_rewrite({"x": 2}, h.gamma_ring.zero())
    return h


def truncated_toy(p: int = 3, height: int = 3, degree: int = 2) -> HopfAlgebroidPresentation:
    """F_p[x]/(x^height) with x primitive; valid when p | binom(height, i)."""
    ring = CoefficientRing.prime_field(p)
    h = HopfAlgebroidPresentation(
        ring,
        [],
        [("x", degree)],
        {},
        {"x": [(Fraction(1), {"x": 1}, {}), (Fraction(1), {}, {"x": 1})]},
        name=f"truncated-F{p}-h{height}",
    )
    h.gamma_ring.add_rewrite({"x": height}, h.gamma_ring.zero())
    return h


BUILTIN = {
    "cubic-2primary": cubic_two_primary,
    "cubic-3local": cubic_three_local,
}
