"""Subgroups of finitely generated abelian p-groups with free parts.

An ambient group is a direct sum of cyclic groups (order 0 meaning free); a
subgroup is stored by integer generator vectors.  Membership, sums, images,
kernels and subquotient presentations all reduce to Smith normal form over
the local ring with the ambient relation vectors appended.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .abgroup import AbelianGroupPresentation
from .ring import CoefficientRing
from .snf import SparseMatrix, smith_normal_form


def _relation_columns(orders):
    cols = []
    for i, o in enumerate(orders):
        if o:
            cols.append({i: Fraction(o)})
    return cols


@dataclass
class SubgroupLattice:
    ring: CoefficientRing
    orders: tuple  # ambient orders per coordinate, 0 = free
    gens: tuple  # generator vectors, each a tuple of ints

    @staticmethod
    def zero(ring, orders) -> "SubgroupLattice":
        return SubgroupLattice(ring, tuple(orders), ())

    @staticmethod
    def full(ring, orders) -> "SubgroupLattice":
        n = len(orders)
        gens = tuple(tuple(1 if i == j else 0 for i in range(n)) for j in range(n))
        return SubgroupLattice(ring, tuple(orders), gens)

    @property
    def ambient_rank(self) -> int:
        return len(self.orders)

    def _matrix_with_relations(self, extra=()):
        cols = [dict(enumerate(map(Fraction, g))) for g in self.gens]
        cols = [{i: v for i, v in c.items() if v} for c in cols]
        cols += [dict(enumerate(map(Fraction, g))) for g in extra]
        cols += _relation_columns(self.orders)
        return SparseMatrix.from_columns(cols, self.ambient_rank)

    def contains(self, vec) -> bool:
        from .snf import solve

        b = {i: Fraction(v) for i, v in enumerate(vec) if v}
        if not b:
            return True
        return solve(self._matrix_with_relations(), b, self.ring) is not None

    def contains_lattice(self, other: "SubgroupLattice") -> bool:
        return all(self.contains(g) for g in other.gens)

    def sum(self, other: "SubgroupLattice") -> "SubgroupLattice":
        return SubgroupLattice(self.ring, self.orders, tuple(self.gens) + tuple(other.gens))

    def add_vectors(self, vectors) -> "SubgroupLattice":
        return SubgroupLattice(
            self.ring, self.orders, tuple(self.gens) + tuple(tuple(v) for v in vectors)
        )

    def group_order(self) -> int:
        """Order of the subgroup; 0 when it has a free part."""
        g = self.presentation()
        return g.total_order()

    def presentation(self, names=None, prefix="y") -> AbelianGroupPresentation:
        """The subgroup itself, presented abstractly."""
        # subgroup generated by gens inside ambient: quotient of Z^k by the
        # kernel of (gens mod relations)
        k = len(self.gens)
        if k == 0:
            return AbelianGroupPresentation(self.ring, 0, (), ())
        # relations among the generators: solve combinations landing in ambient relations
        from .snf import kernel_basis

        cols = [dict(enumerate(map(Fraction, g))) for g in self.gens]
        cols = [{i: v for i, v in c.items() if v} for c in cols]
        rel = _relation_columns(self.orders)
        mat = SparseMatrix.from_columns(cols + rel, self.ambient_rank)
        kern = kernel_basis(mat, self.ring)
        # restrict kernel vectors to the first k coordinates: relation matrix
        rel_cols = []
        for j in range(kern.cols):
            col = {i: v for i, v in kern.column(j).items() if i < k}
            rel_cols.append(col)
        relm = SparseMatrix.from_columns(rel_cols, k)
        res = smith_normal_form(relm, self.ring, need_u=True, need_v=False)
        torsion = []
        free = 0
        for i in range(k):
            d = res.d.get(i, i) if i < res.rank else Fraction(0)
            order = self.ring.canonical_order(d) if d != 0 else 0
            if order == 1:
                continue
            if order == 0:
                free += 1
            else:
                torsion.append(order)
        torsion.sort()
        if names is None:
            names = tuple(f"{prefix}{i}" for i in range(len(torsion) + free))
        return AbelianGroupPresentation(self.ring, free, tuple(torsion), tuple(names))

    def quotient_by(self, sub: "SubgroupLattice", names=None, prefix="q"):
        """Present self/sub; returns (presentation, generator reps, project fn).

        project maps an ambient vector lying in self to quotient coordinates.
        """
        from .homology import subquotient_homology

        k = len(self.gens)
        ambient = self.ambient_rank
        # model: Z^k --G--> ambient; quotient = Z^k / (preimage of sub + relations)
        # use subquotient_homology with d_out = 0 on the subgroup's abstract coords
        # simpler: compute in ambient: self/sub+relations as subquotient of Z^ambient:
        # H = span(self) / span(sub, relations) intersected appropriately.
        d_in_cols = [dict(enumerate(map(Fraction, g))) for g in sub.gens]
        d_in_cols += _relation_columns(self.orders)
        d_in_cols = [{i: v for i, v in c.items() if v} for c in d_in_cols]
        from .snf import kernel_basis, solve

        gen_mat = self._matrix_with_relations()
        sub_in_self = []
        for c in d_in_cols:
            x = solve(gen_mat, c, self.ring)
            if x is None:
                raise ValueError("subgroup is not contained in the lattice")
            sub_in_self.append({i: v for i, v in x.items() if i < k and v})
        # syzygies: combinations of the generators that vanish in the ambient
        kern = kernel_basis(gen_mat, self.ring)
        for j in range(kern.cols):
            col = {i: v for i, v in kern.column(j).items() if i < k and v}
            if col:
                sub_in_self.append(col)
        d_in = SparseMatrix.from_columns(sub_in_self, k)
        d_out = SparseMatrix.zero(0, k)
        h = subquotient_homology(d_in, d_out, self.ring, check_complex=False,
                                 names=names, name_prefix=prefix)
        reps = []
        for gi in range(h.group.num_generators):
            coords = h.representative(gi)
            vec = [0] * ambient
            for i, c in coords.items():
                if i < k:
                    for a, ga in enumerate(self.gens[i]):
                        vec[a] += int(c) * ga
            reps.append(tuple(self._reduce_vec(vec)))

        def project(ambient_vec):
            b = {i: Fraction(v) for i, v in enumerate(ambient_vec) if v}
            x = solve(gen_mat, b, self.ring)
            if x is None:
                return None
            coords = {i: v for i, v in x.items() if i < k}
            return h.project(coords)

        return h.group, reps, project

    def _reduce_vec(self, vec):
        out = []
        for v, o in zip(vec, self.orders):
            out.append(v % o if o else v)
        return out

    def image_under(self, matrix_cols, target: "SubgroupLattice") -> "SubgroupLattice":
        """Image lattice of self under a map given by columns on ambient coords."""
        new_gens = []
        for g in self.gens:
            vec = [0] * target.ambient_rank
            for i, gi in enumerate(g):
                if not gi:
                    continue
                for a, m in matrix_cols[i].items():
                    vec[a] += gi * m
            new_gens.append(tuple(target._reduce_vec(vec)))
        return SubgroupLattice(target.ring, target.orders, tuple(new_gens))

    def saturation_index_trivial(self) -> bool:
        return True
