"""Sparse matrices and Smith normal form over the supported coefficient rings.

Entries are Fractions whose denominators are units of the ring.  Over Z_(p)
and F_p the ring is a discrete valuation ring and a global-minimum-valuation
pivot divides every remaining entry, so elimination needs no Euclidean steps;
over Z[1/S] a standard gcd reduction runs first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ring import CoefficientRing, ZERO

try:  # C-backed rationals make dense elimination an order of magnitude faster
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction


class CompositeNotZero(Exception):
    """d_out . d_in != 0 where a complex was expected."""


@dataclass
class SparseMatrix:
    rows: int
    cols: int
    entries: dict = field(default_factory=dict)  # (i, j) -> Fraction, no zeros

    @staticmethod
    def identity(n: int) -> "SparseMatrix":
        return SparseMatrix(n, n, {(i, i): Fraction(1) for i in range(n)})

    @staticmethod
    def zero(rows: int, cols: int) -> "SparseMatrix":
        return SparseMatrix(rows, cols, {})

    @staticmethod
    def from_rows(data) -> "SparseMatrix":
        data = [list(r) for r in data]
        rows = len(data)
        cols = len(data[0]) if data else 0
        ent = {}
        for i, row in enumerate(data):
            for j, x in enumerate(row):
                x = Fraction(x)
                if x != 0:
                    ent[(i, j)] = x
        return SparseMatrix(rows, cols, ent)

    @staticmethod
    def from_columns(cols_list, rows: int) -> "SparseMatrix":
        ent = {}
        for j, col in enumerate(cols_list):
            for i, x in col.items() if isinstance(col, dict) else enumerate(col):
                x = Fraction(x)
                if x != 0:
                    ent[(i, j)] = x
        return SparseMatrix(rows, len(cols_list), ent)

    def get(self, i: int, j: int) -> Fraction:
        return self.entries.get((i, j), ZERO)

    def set(self, i: int, j: int, x: Fraction):
        x = Fraction(x)
        if x == 0:
            self.entries.pop((i, j), None)
        else:
            self.entries[(i, j)] = x

    def column(self, j: int) -> dict:
        return {i: x for (i, jj), x in self.entries.items() if jj == j}

    def to_dense(self):
        return [[self.get(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.cols, self.rows, {(j, i): x for (i, j), x in self.entries.items()}
        )

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row: dict[int, dict[int, Fraction]] = {}
        for (i, k), x in self.entries.items():
            by_row.setdefault(i, {})[k] = x
        other_rows: dict[int, dict[int, Fraction]] = {}
        for (k, j), y in other.entries.items():
            other_rows.setdefault(k, {})[j] = y
        ent: dict = {}
        for i, row in by_row.items():
            acc: dict[int, Fraction] = {}
            for k, x in row.items():
                orow = other_rows.get(k)
                if not orow:
                    continue
                for j, y in orow.items():
                    acc[j] = acc.get(j, ZERO) + x * y
            for j, v in acc.items():
                if v != 0:
                    ent[(i, j)] = v
        return SparseMatrix(self.rows, other.cols, ent)

    def apply(self, vec: dict) -> dict:
        """Matrix times sparse column vector (dict index -> Fraction)."""
        out: dict[int, Fraction] = {}
        for (i, j), x in self.entries.items():
            y = vec.get(j)
            if y:
                out[i] = out.get(i, ZERO) + x * y
        return {i: v for i, v in out.items() if v != 0}

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (
            isinstance(other, SparseMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )


class _Work:
    """Destructive elimination workspace with row/col indexes and transforms."""

    def __init__(self, m: SparseMatrix, ring: CoefficientRing, need_u: bool, need_v: bool):
        self.ring = ring
        self.nrows = m.rows
        self.ncols = m.cols
        self.row: dict[int, dict[int, object]] = {}
        self.colidx: dict[int, set[int]] = {}
        for (i, j), x in m.entries.items():
            x = ring.reduce(x)
            if x == 0:
                continue
            self.row.setdefault(i, {})[j] = _Q(x.numerator, x.denominator)
            self.colidx.setdefault(j, set()).add(i)
        # transforms as dict-of-dicts, identity to start
        self.urow = {i: {i: _Q(1)} for i in range(m.rows)} if need_u else None
        self.vcol = {j: {j: _Q(1)} for j in range(m.cols)} if need_v else None

    def entry(self, i, j):
        return self.row.get(i, {}).get(j, 0)

    def _reduce(self, x):
        if self.ring.kind != "field":
            return x
        p = self.ring.p
        den = int(x.denominator) % p
        num = int(x.numerator) % p
        return _Q((num * pow(den, -1, p)) % p)

    def set_entry(self, i, j, x):
        x = self._reduce(x)
        r = self.row.setdefault(i, {})
        c = self.colidx.setdefault(j, set())
        if x == 0:
            if j in r:
                del r[j]
                c.discard(i)
        else:
            r[j] = x
            c.add(i)

    def swap_rows(self, a, b):
        if a == b:
            return
        ra, rb = self.row.get(a, {}), self.row.get(b, {})
        for j in set(ra) | set(rb):
            s = self.colidx[j]
            ina, inb = a in s, b in s
            if ina != inb:
                if ina:
                    s.discard(a)
                    s.add(b)
                else:
                    s.discard(b)
                    s.add(a)
        self.row[a], self.row[b] = rb, ra
        if self.urow is not None:
            self.urow[a], self.urow[b] = self.urow.get(b, {}), self.urow.get(a, {})

    def swap_cols(self, a, b):
        if a == b:
            return
        ca = self.colidx.get(a, set()).copy()
        cb = self.colidx.get(b, set()).copy()
        for i in ca | cb:
            r = self.row[i]
            va, vb = r.get(a), r.get(b)
            if vb is None:
                del r[a]
            else:
                r[a] = vb
            if va is None:
                r.pop(b, None)
            else:
                r[b] = va
        self.colidx[a], self.colidx[b] = cb, ca
        if self.vcol is not None:
            self.vcol[a], self.vcol[b] = self.vcol.get(b, {}), self.vcol.get(a, {})

    def scale_row(self, i, c):
        c = _Q(c.numerator, c.denominator) if hasattr(c, "numerator") else _Q(c)
        r = self.row.get(i, {})
        for j in list(r):
            self.set_entry(i, j, r[j] * c)
        if self.urow is not None:
            u = self.urow.get(i, {})
            self.urow[i] = {k: v * c for k, v in u.items()}

    def addmul_row(self, src, dst, c):
        """row[dst] += c * row[src]"""
        if c == 0:
            return
        is_field = self.ring.kind == "field"
        rs = self.row.get(src, {})
        rd = self.row.setdefault(dst, {})
        for j, x in rs.items():
            nv = rd.get(j, 0) + c * x
            if is_field and nv != 0:
                nv = self._reduce(nv)
            if nv == 0:
                if j in rd:
                    del rd[j]
                    self.colidx[j].discard(dst)
            else:
                if j not in rd:
                    self.colidx.setdefault(j, set()).add(dst)
                rd[j] = nv
        if self.urow is not None:
            u = self.urow.setdefault(dst, {})
            for k, v in self.urow.get(src, {}).items():
                nv = u.get(k, 0) + c * v
                if nv == 0:
                    u.pop(k, None)
                else:
                    u[k] = nv

    def addmul_col(self, src, dst, c):
        """col[dst] += c * col[src]"""
        if c == 0:
            return
        is_field = self.ring.kind == "field"
        cd = self.colidx.setdefault(dst, set())
        for i in list(self.colidx.get(src, set())):
            x = self.row[i][src]
            rd = self.row.setdefault(i, {})
            nv = rd.get(dst, 0) + c * x
            if is_field and nv != 0:
                nv = self._reduce(nv)
            if nv == 0:
                if dst in rd:
                    del rd[dst]
                    cd.discard(i)
            else:
                rd[dst] = nv
                cd.add(i)
        if self.vcol is not None:
            v = self.vcol.setdefault(dst, {})
            for k, w in self.vcol.get(src, {}).items():
                nv = v.get(k, 0) + c * w
                if nv == 0:
                    v.pop(k, None)
                else:
                    v[k] = nv


@dataclass
class SNFResult:
    d: SparseMatrix
    u: SparseMatrix | None
    v: SparseMatrix | None
    diagonal: list  # Fractions, the nonzero diagonal entries in order
    rank: int

    def canonical_orders(self, ring: CoefficientRing) -> list[int]:
        return [ring.canonical_order(x) for x in self.diagonal]


def smith_normal_form(
    m: SparseMatrix,
    ring: CoefficientRing,
    need_u: bool = True,
    need_v: bool = True,
    content_strip: bool = False,
) -> SNFResult:
    """U . M . V = D with D diagonal, d1 | d2 | ... up to units.

    With content_strip (local rings only), once no unit pivot remains the
    common p-power of the submatrix is divided out, scaling the affected U
    rows along.  U is then no longer unimodular, but U.M.V = D still holds
    with the stripped diagonal, kernels/ranks/solve() are unaffected, and the
    true invariant factors are restored in `diagonal` via the recorded
    content exponents.
    """
    w = _Work(m, ring, need_u, need_v)
    k = 0
    limit = min(m.rows, m.cols)
    strippable = content_strip and ring.kind in ("local", "field")
    content_exp = []  # accumulated stripped p-exponent per pivot index
    stripped = 0
    while k < limit:
        if strippable:
            pivot = _choose_pivot(w, k, units_only=True)
            if pivot is None:
                extra = _strip_content(w, k)
                if extra is None:
                    break
                stripped += extra
                pivot = _choose_pivot(w, k, units_only=True)
                if pivot is None:
                    break
        else:
            pivot = _choose_pivot(w, k)
        if pivot is None:
            break
        content_exp.append(stripped)
        pi, pj = pivot
        w.swap_rows(k, pi)
        w.swap_cols(k, pj)
        if ring.kind == "invert":
            _euclid_reduce(w, k)
        pv = w.entry(k, k)
        # clear column k then row k; over a DVR the pivot divides everything
        for i in list(w.colidx.get(k, set())):
            if i == k:
                continue
            q = w.row[i][k] / pv
            if ring.kind == "invert" and not ring.contains(q):
                raise AssertionError("pivot fails to divide after reduction")
            w.addmul_row(k, i, -q)
        for j in list(w.row.get(k, {})):
            if j == k:
                continue
            q = w.row[k][j] / pv
            w.addmul_col(k, j, -q)
        k += 1
    # normalize pivots: make each diagonal entry the canonical order representative
    diag = []  # true invariant factors, content restored
    stored = []  # what U.M.V actually equals after stripping
    for i in range(k):
        x = w.entry(i, i)
        restore = ring.p ** content_exp[i] if (strippable and content_exp[i]) else 1
        target = Fraction(ring.canonical_order(x) * restore)
        if ring.kind == "field":
            target = Fraction(1)
            restore = 1
        stored_target = Fraction(target, restore)
        if x != _Q(stored_target.numerator, stored_target.denominator):
            w.scale_row(i, _Q(stored_target.numerator, stored_target.denominator) / x)
        diag.append(target)
        stored.append(stored_target)
    if ring.kind == "invert":
        _fix_divisibility(w, diag, ring)
        stored = diag
    d = SparseMatrix(
        m.rows, m.cols, {(i, i): stored[i] for i in range(len(stored)) if stored[i] != 0}
    )
    u = _dictdict_to_matrix(w.urow, m.rows, m.rows) if need_u else None
    v = _dictdict_to_matrix_cols(w.vcol, m.cols, m.cols) if need_v else None
    diag = [x for x in diag if x != 0]
    return SNFResult(d, u, v, diag, len(diag))


def _choose_pivot(w: _Work, k: int, units_only: bool = False):
    """Unit pivot with low Markowitz fill, scanning short columns first."""
    cols = [(len(rows), j) for j, rows in w.colidx.items() if j >= k and rows]
    if not cols:
        return None
    cols.sort()
    best = None
    best_key = None
    examined = 0
    local = w.ring.kind in ("local", "field")
    p = w.ring.p if local else 0
    for clen, j in cols:
        for i in w.colidx[j]:
            if i < k:
                continue
            x = w.row[i][j]
            if local:
                if int(x.numerator) % p:
                    v = 0
                elif units_only:
                    continue
                else:
                    v = w.ring.pivot_measure(x)
            else:
                v = w.ring.pivot_measure(x)
            fill = (clen - 1) * (len(w.row[i]) - 1)
            key = (v, fill)
            if best_key is None or key < best_key:
                best_key = key
                best = (i, j)
                if key == (0, 0):
                    return best
        examined += 1
        if best_key is not None and best_key[0] == 0 and (best_key[1] <= 2 or examined > 12):
            return best
    return best


def _strip_content(w: _Work, k: int) -> int | None:
    """Divide the remaining submatrix by its common p-power.

    Returns the stripped exponent (0 when a unit already exists), or None
    when the submatrix is empty.
    """
    p = w.ring.p
    from .ring import padic_valuation

    vmin = None
    for i, r in w.row.items():
        if i < k:
            continue
        for j, x in r.items():
            if j < k:
                continue
            v = padic_valuation(x, p)
            if v is not None and (vmin is None or v < vmin):
                vmin = v
                if vmin == 0:
                    return 0
    if vmin is None:
        return None
    q = _Q(1, p**vmin)
    for i, r in w.row.items():
        if i < k:
            continue
        for j in list(r):
            if j >= k:
                r[j] = r[j] * q
        if w.urow is not None and i in w.urow:
            w.urow[i] = {c: v * q for c, v in w.urow[i].items()}
    return vmin


def _euclid_reduce(w: _Work, k: int):
    """gcd reduction so the (k,k) entry divides its row and column (invert mode)."""
    ring = w.ring
    changed = True
    while changed:
        changed = False
        pv = w.entry(k, k)
        for i in list(w.colidx.get(k, set())):
            if i == k:
                continue
            x = w.entry(i, k)
            if not ring.divides(pv, x):
                q = _Q(int(x / pv))
                w.addmul_row(k, i, -q)
                if w.ring.pivot_measure(w.entry(i, k)) < w.ring.pivot_measure(pv):
                    w.swap_rows(k, i)
                changed = True
                break
        if changed:
            continue
        for j in list(w.row.get(k, {})):
            if j == k:
                continue
            x = w.entry(k, j)
            if not ring.divides(pv, x):
                q = _Q(int(x / pv))
                w.addmul_col(k, j, -q)
                if w.ring.pivot_measure(w.entry(k, j)) < w.ring.pivot_measure(pv):
                    w.swap_cols(k, j)
                changed = True
                break


def _fix_divisibility(w: _Work, diag: list, ring: CoefficientRing):
    n = len(diag)
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            a, b = diag[i], diag[i + 1]
            if a == 0 and b != 0:
                diag[i], diag[i + 1] = b, a
                w.swap_rows(i, i + 1)
                w.swap_cols(i, i + 1)
                changed = True
            elif a != 0 and b != 0 and not ring.divides(a, b):
                # standard 2x2 fix: replace (a, b) by (gcd, lcm)
                from math import gcd as _g

                g = Fraction(_g(int(a), int(b)))
                l = Fraction(abs(int(a) * int(b))) / g
                w.addmul_col(i + 1, i, Fraction(1))
                _euclid_reduce(w, i)
                pv = w.entry(i, i)
                for r in list(w.colidx.get(i, set())):
                    if r != i:
                        w.addmul_row(i, r, -w.entry(r, i) / pv)
                for c in list(w.row.get(i, {})):
                    if c != i:
                        w.addmul_col(i, c, -w.entry(i, c) / pv)
                diag[i] = Fraction(ring.canonical_order(w.entry(i, i)))
                w.scale_row(i, diag[i] / w.entry(i, i))
                diag[i + 1] = Fraction(ring.canonical_order(w.entry(i + 1, i + 1)))
                if w.entry(i + 1, i + 1) != 0:
                    w.scale_row(i + 1, diag[i + 1] / w.entry(i + 1, i + 1))
                changed = True
    return diag


def _dictdict_to_matrix(rows: dict, nrows: int, ncols: int) -> SparseMatrix:
    ent = {}
    for i, r in rows.items():
        for j, x in r.items():
            if x != 0:
                ent[(i, j)] = Fraction(int(x.numerator), int(x.denominator))
    return SparseMatrix(nrows, ncols, ent)


def _dictdict_to_matrix_cols(cols: dict, nrows: int, ncols: int) -> SparseMatrix:
    ent = {}
    for j, c in cols.items():
        for i, x in c.items():
            if x != 0:
                ent[(i, j)] = Fraction(int(x.numerator), int(x.denominator))
    return SparseMatrix(nrows, ncols, ent)


def kernel_basis(m: SparseMatrix, ring: CoefficientRing) -> SparseMatrix:
    """Columns spanning {x : Mx = 0} over the ring (a saturated direct summand).

    Pure column elimination: unimodular column operations preserve the kernel,
    and per-row minimal-valuation pivots keep quotients in the ring.
    """
    is_field = ring.kind == "field"
    p = ring.p if ring.kind in ("local", "field") else 0

    def red(x):
        if not is_field:
            return x
        den = int(x.denominator) % p
        num = int(x.numerator) % p
        return _Q((num * pow(den, -1, p)) % p)

    cols: list[dict] = [dict() for _ in range(m.cols)]
    rowidx: dict[int, set[int]] = {}
    for (i, j), x in m.entries.items():
        x = red(_Q(x.numerator, x.denominator))
        if x == 0:
            continue
        cols[j][i] = x
        rowidx.setdefault(i, set()).add(j)
    trans: list[dict] = [{j: _Q(1)} for j in range(m.cols)]
    live = set(range(m.cols))
    done_rows = set()
    rowlive = {i: len(js) for i, js in rowidx.items()}

    def measure(x):
        if p:
            return 0 if int(x.numerator) % p else ring.pivot_measure(x)
        return ring.pivot_measure(x)

    while True:
        # cheapest eliminable row: fewest live columns touching it
        best = None
        for i, nlive in rowlive.items():
            if i in done_rows or nlive == 0:
                continue
            cand = (nlive, i)
            if best is None or cand < best:
                best = cand
                if cand[0] == 1:
                    break
        if best is None:
            break
        _, row = best
        js = [j for j in rowidx[row] if j in live]
        pivot_j = None
        pivot_v = None
        for j in js:
            x = cols[j][row]
            v = measure(x)
            if pivot_v is None or v < pivot_v or (
                v == pivot_v and len(cols[j]) < len(cols[pivot_j])
            ):
                pivot_v = v
                pivot_j = j
                if v == 0 and len(cols[j]) == 1:
                    break
        pv = cols[pivot_j][row]
        for j in js:
            if j == pivot_j:
                continue
            f = cols[j][row] / pv
            if ring.kind == "invert" and not ring.contains(f):
                raise AssertionError("pivot fails to divide a row entry")
            col_p = cols[pivot_j]
            col_j = cols[j]
            for i, v in col_p.items():
                nv = red(col_j.get(i, 0) - f * v)
                if nv == 0:
                    if i in col_j:
                        del col_j[i]
                        rowidx[i].discard(j)
                        rowlive[i] -= 1
                else:
                    if i not in col_j:
                        rowidx.setdefault(i, set()).add(j)
                        rowlive[i] = rowlive.get(i, 0) + 1
                    col_j[i] = nv
            t = trans[j]
            for k2, v in trans[pivot_j].items():
                nv = t.get(k2, 0) - f * v
                if nv == 0:
                    t.pop(k2, None)
                else:
                    t[k2] = nv
        done_rows.add(row)
        live.discard(pivot_j)
        for i in cols[pivot_j]:
            rowlive[i] -= 1
    out_cols = []
    for j in sorted(live):
        if cols[j]:
            raise AssertionError("live column with remaining support")
        out_cols.append({
            i: Fraction(int(x.numerator), int(x.denominator)) for i, x in trans[j].items()
        })
    return SparseMatrix.from_columns(out_cols, m.cols)


class PrecisionLoss(Exception):
    """2-adic working precision exhausted; recompute exactly."""


def divisor_profile_2adic(m: SparseMatrix, precision: int = 48):
    """(rank, sorted nonunit 2-power divisors) via arithmetic mod 2^precision.

    Entries are represented mod 2^precision (denominators are odd, hence
    invertible); unit pivots eliminate Gaussian-style and when none remain the
    common 2-power of the submatrix is stripped and recorded.  Raises
    PrecisionLoss when the accumulated valuations approach the precision, in
    which case the caller should fall back to exact arithmetic.  Callers are
    expected to cross-check the rank against an independent modular rank.
    """
    working = precision
    mod = 1 << working
    mask = mod - 1
    cols: list[dict] = [dict() for _ in range(m.cols)]
    rowidx: dict[int, set[int]] = {}
    for (i, j), x in m.entries.items():
        v = (int(x.numerator) * pow(int(x.denominator), -1, mod)) & mask
        if v:
            cols[j][i] = v
            rowidx.setdefault(i, set()).add(j)
    live = set(j for j in range(m.cols) if cols[j])
    rowlive = {i: len(js) for i, js in rowidx.items()}
    divisors = []
    rank = 0
    stripped = 0
    done_rows: set = set()
    blocked: set = set()  # rows with no odd live entry, until their entries change
    while True:
        # row-driven unit phase: cheapest row with an odd entry in a live column
        best = None
        for i, nlive in rowlive.items():
            if i in done_rows or nlive == 0 or i in blocked:
                continue
            cand = (nlive, i)
            if best is None or cand < best:
                if any(cols[j][i] & 1 for j in rowidx[i] if j in live):
                    best = cand
                    if cand[0] == 1:
                        break
                else:
                    blocked.add(i)
        if best is None:
            # no unit pivot anywhere: strip the common 2-power of live columns
            vmin = None
            for j in live:
                for i, x in cols[j].items():
                    if i in done_rows:
                        continue
                    v = (x & -x).bit_length() - 1
                    if vmin is None or v < vmin:
                        vmin = v
                if vmin == 0:
                    break
            if vmin is None:
                break
            if vmin == 0:
                raise AssertionError("odd entry escaped the scan")
            stripped += vmin
            working -= vmin
            if working < 12:
                raise PrecisionLoss(f"only {working} working bits left")
            mod = 1 << working
            mask = mod - 1
            blocked.clear()
            for j in list(live):
                cj = cols[j]
                for i in list(cj):
                    if i in done_rows:
                        # entries of frozen pivot rows are irrelevant now
                        del cj[i]
                        rowidx[i].discard(j)
                        continue
                    nv = (cj[i] >> vmin) & mask
                    if nv == 0:
                        del cj[i]
                        rowidx[i].discard(j)
                        rowlive[i] -= 1
                    else:
                        cj[i] = nv
                if not cj:
                    live.discard(j)
            continue
        _, row = best
        js = [j for j in rowidx[row] if j in live]
        pivot_j = None
        for j in js:
            if cols[j][row] & 1:
                if pivot_j is None or len(cols[j]) < len(cols[pivot_j]):
                    pivot_j = j
        pv = cols[pivot_j][row]
        inv = pow(pv, -1, mod)
        col_p = cols[pivot_j]
        for j in js:
            if j == pivot_j:
                continue
            f = (cols[j][row] * inv) & mask
            col_j = cols[j]
            for i, v in col_p.items():
                nv = (col_j.get(i, 0) - f * v) & mask
                blocked.discard(i)
                if nv == 0:
                    if i in col_j:
                        del col_j[i]
                        rowidx[i].discard(j)
                        if i not in done_rows:
                            rowlive[i] -= 1
                else:
                    if i not in col_j:
                        rowidx.setdefault(i, set()).add(j)
                        if i not in done_rows:
                            rowlive[i] = rowlive.get(i, 0) + 1
                    col_j[i] = nv
            if not col_j:
                live.discard(j)
        done_rows.add(row)
        live.discard(pivot_j)
        for i in col_p:
            if i not in done_rows:
                rowlive[i] -= 1
        rank += 1
        divisors.append(1 << stripped)
    divisors_sorted = sorted(d for d in divisors if d > 1)
    if divisors_sorted and divisors_sorted[-1] > 1 << (precision // 4):
        raise PrecisionLoss("implausibly large divisor, precision suspect")
    return rank, divisors_sorted


def rank_mod_prime(m: SparseMatrix, p: int = (1 << 31) - 1) -> int:
    """Rank of the matrix over F_p (a lower bound for the rational rank)."""
    cols: list[dict] = [dict() for _ in range(m.cols)]
    rowidx: dict[int, set[int]] = {}
    for (i, j), x in m.entries.items():
        num = int(x.numerator) % p
        den = int(x.denominator) % p
        v = (num * pow(den, -1, p)) % p
        if v:
            cols[j][i] = v
            rowidx.setdefault(i, set()).add(j)
    live = set(j for j in range(m.cols) if cols[j])
    rank = 0
    rowlive = {i: len(js) for i, js in rowidx.items()}
    done_rows = set()
    while True:
        best = None
        for i, nlive in rowlive.items():
            if i in done_rows or nlive == 0:
                continue
            cand = (nlive, i)
            if best is None or cand < best:
                best = cand
                if cand[0] == 1:
                    break
        if best is None:
            return rank
        _, row = best
        js = [j for j in rowidx[row] if j in live]
        if not js:
            done_rows.add(row)
            rowlive[row] = 0
            continue
        pivot_j = min(js, key=lambda j: len(cols[j]))
        pv = cols[pivot_j][row]
        pv_inv = pow(pv, -1, p)
        col_p = cols[pivot_j]
        for j in js:
            if j == pivot_j:
                continue
            f = (cols[j][row] * pv_inv) % p
            col_j = cols[j]
            for i, v in col_p.items():
                nv = (col_j.get(i, 0) - f * v) % p
                if nv == 0:
                    if i in col_j:
                        del col_j[i]
                        rowidx[i].discard(j)
                        rowlive[i] -= 1
                else:
                    if i not in col_j:
                        rowidx.setdefault(i, set()).add(j)
                        rowlive[i] = rowlive.get(i, 0) + 1
                    col_j[i] = nv
        done_rows.add(row)
        live.discard(pivot_j)
        for i in col_p:
            rowlive[i] -= 1
        rank += 1


def solve(m: SparseMatrix, b: dict, ring: CoefficientRing) -> dict | None:
    """One solution x of Mx = b over the ring, or None."""
    res = smith_normal_form(m, ring, need_u=True, need_v=True, content_strip=True)
    ub = res.u.apply(b)
    y: dict[int, Fraction] = {}
    for i, val in ub.items():
        if i < res.rank:
            d = res.d.get(i, i)
            q = val / d
            if not ring.contains(q) or (ring.kind == "field" and False):
                return None
            y[i] = q
        elif not ring.is_zero(val):
            return None
    x = res.v.apply(y)
    return x
