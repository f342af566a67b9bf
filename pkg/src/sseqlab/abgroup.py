"""Finitely generated abelian groups over the coefficient ring.

A presentation is a free rank plus a list of torsion orders (p-powers over
Z_(p), ascending by divisibility) with one name per generator.  Torsion
generators come first, mirroring how subquotient homology emits them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ring import CoefficientRing


@dataclass(frozen=True)
class AbelianGroupPresentation:
    ring: CoefficientRing
    free_rank: int = 0
    torsion_orders: tuple = ()
    generator_names: tuple = ()

    def __post_init__(self):
        orders = tuple(int(t) for t in self.torsion_orders)
        object.__setattr__(self, "torsion_orders", orders)
        for a, b in zip(orders, orders[1:]):
            if b % a != 0:
                raise ValueError(f"torsion orders not ascending by divisibility: {orders}")
        if self.ring.kind == "local":
            for t in orders:
                n = t
                while n % self.ring.p == 0:
                    n //= self.ring.p
                if n != 1:
                    raise ValueError(f"order {t} is not a power of {self.ring.p}")
        if self.ring.kind == "field":
            if self.free_rank != 0 or any(t != self.ring.p for t in orders):
                raise ValueError("field-mode groups are F_p vector spaces")
        names = self.generator_names
        if not names:
            names = tuple(f"t{i}" for i in range(len(orders))) + tuple(
                f"f{i}" for i in range(self.free_rank)
            )
            object.__setattr__(self, "generator_names", names)
        if len(self.generator_names) != len(orders) + self.free_rank:
            raise ValueError("one name per generator required")

    @property
    def num_generators(self) -> int:
        return self.free_rank + len(self.torsion_orders)

    @property
    def orders(self) -> tuple:
        """Order per generator, 0 meaning infinite; torsion generators first."""
        return self.torsion_orders + (0,) * self.free_rank

    def is_trivial(self) -> bool:
        return self.num_generators == 0

    def total_order(self) -> int:
        """Group order; 0 if infinite."""
        if self.free_rank:
            return 0
        n = 1
        for t in self.torsion_orders:
            n *= t
        return n

    def renamed(self, names) -> "AbelianGroupPresentation":
        return AbelianGroupPresentation(
            self.ring, self.free_rank, self.torsion_orders, tuple(names)
        )

    def __str__(self):
        if self.is_trivial():
            return "0"
        parts = [f"Z/{t}<{n}>" for t, n in zip(self.torsion_orders, self.generator_names)]
        free_names = self.generator_names[len(self.torsion_orders):]
        parts += [f"{self.ring}<{n}>" for n in free_names]
        return " + ".join(parts)


def direct_sum(*groups: AbelianGroupPresentation) -> AbelianGroupPresentation:
    if not groups:
        raise ValueError("empty direct sum needs a ring")
    ring = groups[0].ring
    torsion = []
    names_t = []
    free = 0
    names_f = []
    for g in groups:
        if g.ring != ring:
            raise ValueError("mixed rings")
        torsion.extend(zip(g.torsion_orders, g.generator_names))
        free += g.free_rank
        names_f.extend(g.generator_names[len(g.torsion_orders):])
    torsion.sort(key=lambda p: p[0])
    return AbelianGroupPresentation(
        ring,
        free,
        tuple(t for t, _ in torsion),
        tuple(n for _, n in torsion) + tuple(names_f),
    )
