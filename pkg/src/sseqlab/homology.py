"""Subquotient homology of a two-step complex of free modules.

Given d_in: R^a -> R^n and d_out: R^n -> R^b with d_out . d_in = 0, present
ker(d_out)/im(d_in) together with a lift of each homology generator to the
ambient R^n and a partial projection from cycles to homology coordinates.
The kernel is echelonized once; every membership or coordinate question is a
sparse back-substitution against that factorization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .abgroup import AbelianGroupPresentation
from .ring import CoefficientRing, ZERO
from .snf import CompositeNotZero, SparseMatrix, kernel_basis, smith_normal_form


class EchelonSolver:
    """Coordinates with respect to the columns of a saturated full-rank matrix."""

    def __init__(self, mat: SparseMatrix, ring: CoefficientRing):
        self.ring = ring
        self.ncols = mat.cols
        cols = [dict() for _ in range(mat.cols)]
        for (i, j), x in mat.entries.items():
            cols[j][i] = x
        # transform: echelon column j = sum_k trans[j][k] * original column k
        trans = [{j: Fraction(1)} for j in range(mat.cols)]
        pivots = []  # (row, col) in elimination order
        used_rows = set()
        for j in range(mat.cols):
            col = cols[j]
            pivot_row = None
            pivot_measure = None
            for i, x in col.items():
                if i in used_rows:
                    continue
                m = ring.pivot_measure(x)
                if pivot_measure is None or m < pivot_measure:
                    pivot_measure = m
                    pivot_row = i
                    if m == 0:
                        break
            if pivot_row is None:
                raise ValueError("matrix does not have full column rank")
            pv = col[pivot_row]
            for j2 in range(mat.cols):
                if j2 == j:
                    continue
                x = cols[j2].get(pivot_row)
                if not x:
                    continue
                f = x / pv
                if not ring.contains(f):
                    raise ValueError("column lattice is not saturated at a pivot")
                for i, v in col.items():
                    nv = cols[j2].get(i, ZERO) - f * v
                    if ring.kind == "field":
                        nv = ring.reduce(nv)
                    if nv == 0:
                        cols[j2].pop(i, None)
                    else:
                        cols[j2][i] = nv
                t = trans[j2]
                for k, v in trans[j].items():
                    nv = t.get(k, ZERO) - f * v
                    if nv == 0:
                        t.pop(k, None)
                    else:
                        t[k] = nv
            used_rows.add(pivot_row)
            pivots.append((pivot_row, j))
        self.cols = cols
        self.trans = trans
        self.pivots = pivots

    def coords(self, b: dict) -> dict | None:
        """c with mat . c = b, or None when b is outside the column span."""
        b = dict(b)
        echelon_coeff: dict[int, Fraction] = {}
        for row, j in self.pivots:
            x = b.get(row)
            if not x:
                continue
            f = x / self.cols[j][row]
            if not self.ring.contains(f):
                return None
            echelon_coeff[j] = f
            for i, v in self.cols[j].items():
                nv = b.get(i, ZERO) - f * v
                if self.ring.kind == "field":
                    nv = self.ring.reduce(nv)
                if nv == 0:
                    b.pop(i, None)
                else:
                    b[i] = nv
        if any(not self.ring.is_zero(v) for v in b.values()):
            return None
        out: dict[int, Fraction] = {}
        for j, f in echelon_coeff.items():
            for k, v in self.trans[j].items():
                nv = out.get(k, ZERO) + f * v
                if nv == 0:
                    out.pop(k, None)
                else:
                    out[k] = nv
        return out


@dataclass
class SubquotientHomology:
    group: AbelianGroupPresentation
    rep_map: SparseMatrix  # ambient coordinates of each group generator (n x g)
    _solver: EchelonSolver
    _proj_u: SparseMatrix  # coker transform: kernel coords -> generator coords
    _ring: CoefficientRing

    def representative(self, gen_index: int) -> dict:
        return self.rep_map.column(gen_index)

    def project(self, x: dict) -> list | None:
        """Homology coordinates of an ambient cycle; None if x is not a cycle."""
        coords = self._solver.coords(x)
        if coords is None:
            return None
        g = self._proj_u.apply(coords)
        out = []
        orders = self.group.orders
        for i in range(self.group.num_generators):
            c = g.get(i, ZERO)
            if self._ring.kind == "field":
                c = self._ring.reduce(c)
            if orders[i]:
                num = c.numerator * pow(c.denominator, -1, orders[i]) % orders[i] \
                    if self._ring.kind != "field" else int(c)
                out.append(num % orders[i])
            else:
                # free coordinates live in the local ring, not in Z
                out.append(int(c) if c.denominator == 1 else Fraction(c))
        return out


def subquotient_homology(
    d_in: SparseMatrix,
    d_out: SparseMatrix,
    ring: CoefficientRing,
    name_prefix: str = "x",
    names=None,
    check_complex: bool = True,
) -> SubquotientHomology:
    if d_in.rows != d_out.cols:
        raise ValueError("d_in lands in the domain of d_out")
    if check_complex and not (d_out @ d_in).is_zero():
        raise CompositeNotZero("d_out . d_in != 0")
    n = d_in.rows
    kern = kernel_basis(d_out, ring)  # n x k, saturated
    k = kern.cols
    solver = EchelonSolver(kern, ring)
    by_col: dict[int, dict] = {}
    for (i, j), x in d_in.entries.items():
        by_col.setdefault(j, {})[i] = x
    coords_cols = []
    for j in range(d_in.cols):
        coords = solver.coords(by_col.get(j, {}))
        if coords is None:
            raise CompositeNotZero("image column is not a cycle")
        coords_cols.append(coords)
    c = SparseMatrix.from_columns(coords_cols, k)
    res = smith_normal_form(c, ring, need_u=True, need_v=False)
    uinv = _invert_unimodular(res.u, ring)
    torsion = []
    torsion_idx = []
    free_idx = []
    for i in range(k):
        d = res.d.get(i, i) if i < res.rank else ZERO
        order = ring.canonical_order(d) if d != 0 else 0
        if order == 1:
            continue
        if order == 0:
            free_idx.append(i)
        else:
            torsion.append(order)
            torsion_idx.append(i)
    order_keyed = sorted(zip(torsion, torsion_idx))
    torsion = [t for t, _ in order_keyed]
    gen_idx = [i for _, i in order_keyed] + free_idx
    if names is None:
        names = tuple(f"{name_prefix}{i}" for i in range(len(gen_idx)))
    if ring.kind == "field":
        # over F_p every surviving generator spans an F_p summand
        group = AbelianGroupPresentation(
            ring, 0, (ring.p,) * len(gen_idx), tuple(names)
        )
    else:
        group = AbelianGroupPresentation(ring, len(free_idx), tuple(torsion), tuple(names))
    # generator reps in ambient coordinates: kern . (uinv columns)
    rep_cols = [kern.apply(uinv.column(i)) for i in gen_idx]
    rep = SparseMatrix.from_columns(rep_cols, n)
    # projection: kernel coords -> generator coords = selected rows of U
    proj_rows = {}
    for gi, i in enumerate(gen_idx):
        for j in range(k):
            x = res.u.get(i, j)
            if x != 0:
                proj_rows[(gi, j)] = x
    proj = SparseMatrix(len(gen_idx), k, proj_rows)
    return SubquotientHomology(group, rep, solver, proj, ring)


def _invert_unimodular(u: SparseMatrix, ring: CoefficientRing) -> SparseMatrix:
    """Invert a matrix produced as a product of elementary operations."""
    n = u.rows
    res = smith_normal_form(u, ring, need_u=True, need_v=True)
    if res.rank != n or any(ring.canonical_order(d) != 1 for d in res.diagonal):
        raise ValueError("matrix is not invertible over the ring")
    # u = U^-1 D V^-1 => u^-1 = V D^-1 U
    dinv = SparseMatrix(
        n, n, {(i, i): Fraction(1) / res.d.get(i, i) for i in range(n)}
    )
    return res.v @ (dinv @ res.u)
