"""Multiplicative bigraded spectral sequence state and differential closure.

Pages are kept as sublattices B_r <= Z_r of the E2 cell groups.  Recorded
differentials live on spans of elements; closure fires the Leibniz rule on
every resolvable product of recorded classes, transports along permanent
periodicity operators, and runs a division step (if d(pi.x) is known, pi is
permanent and multiplication by pi is injective where it matters, d(x)
follows).  Consistency is checked on every record, up to a unit where a
schedule entry carries the ambiguous-sign marker.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .abgroup import AbelianGroupPresentation
from .deck import E2Deck, ScheduleEntry, fmt_combo
from .lattice import SubgroupLattice
from .snf import SparseMatrix, kernel_basis, solve


class EngineError(Exception):
    pass


class NotACycle(EngineError):
    pass


class TargetAlreadyBoundary(EngineError):
    pass


class InconsistentDifferential(EngineError):
    pass


class UnderdeterminedPage(EngineError):
    def __init__(self, cells):
        super().__init__(f"underdetermined cells: {sorted(cells)}")
        self.cells = cells


class WindowNotConverged(EngineError):
    pass


@dataclass
class DiffRecord:
    vec: tuple  # element of the cell, E2 coordinates
    dvec: tuple  # value in the target cell, E2 coordinates
    provenance: str
    up_to_unit: bool = False
    trace: tuple = ()


@dataclass
class Cell:
    names: tuple
    orders: tuple
    z: SubgroupLattice
    b: SubgroupLattice


@dataclass
class ConsequenceSet:
    page: int
    entries: list  # (cell, vec, dvec, provenance, trace)

    def describe(self, deck: E2Deck) -> list:
        out = []
        for cell, vec, dvec, prov, trace in self.entries:
            src = fmt_named(deck, cell, vec)
            tgt_cell = (cell[0] - 1, cell[1] + self.page)
            tgt = fmt_named(deck, tgt_cell, dvec) or "0"
            out.append(f"d{self.page}({src}) = {tgt}   [{prov}]"
                       + (f" via {' ; '.join(trace)}" if trace else ""))
        return out


def fmt_named(deck: E2Deck, cell, vec) -> str:
    names = deck.cell_names(*cell)
    combo = {names[i]: c for i, c in enumerate(vec) if c}
    return fmt_combo(combo)


class SpectralSequenceState:
    def __init__(self, deck: E2Deck):
        deck.validate()
        self.deck = deck
        self.ring = deck.ring
        self.page = 2
        self.cells: dict = {}
        for (n, s), names in deck.by_bidegree.items():
            orders = deck.cell_orders(n, s)
            self.cells[(n, s)] = Cell(
                tuple(names), orders,
                SubgroupLattice.full(self.ring, orders),
                SubgroupLattice.zero(self.ring, orders),
            )
        # recorded differentials on the current page
        self.diffs: dict = {}
        self.frontier: set = set()
        self._mark_permanent()
        self._presentation_cache: dict = {}

    # -- basic access -----------------------------------------------------------

    def cell(self, n, s) -> Cell | None:
        return self.cells.get((n, s))

    def names(self, n, s):
        return self.deck.cell_names(n, s)

    def combo_to_vec(self, combo: dict):
        degs = {(self.deck.by_name[x].n, self.deck.by_name[x].s) for x in combo}
        if len(degs) != 1:
            raise EngineError(f"mixed bidegrees in {fmt_combo(combo)}")
        (n, s) = degs.pop()
        names = self.names(n, s)
        vec = [0] * len(names)
        for name, c in combo.items():
            vec[names.index(name)] = c
        return (n, s), tuple(self._reduce(vec, self.cells[(n, s)].orders))

    @staticmethod
    def _reduce(vec, orders):
        return [v % o if o else v for v, o in zip(vec, orders)]

    def _mark_permanent(self):
        for name in self.deck.permanent:
            c = self.deck.by_name[name]
            names = self.names(c.n, c.s)
            vec = tuple(1 if nm == name else 0 for nm in names)
            self.diffs.setdefault((c.n, c.s), []).append(
                DiffRecord(vec, self._zero_target(c.n, c.s), "permanent")
            )

    def _zero_target(self, n, s):
        tgt = (n - 1, s + self.page)
        names = self.names(*tgt)
        return (0,) * len(names)

    # -- element arithmetic -------------------------------------------------------

    def product_vec(self, cell1, vec1, cell2, vec2):
        """Product element, or None when some needed table entry is missing."""
        n, s = cell1[0] + cell2[0], cell1[1] + cell2[1]
        if not self.deck.in_window(n, s):
            return None, None
        names_t = self.names(n, s)
        out = [0] * len(names_t)
        names1 = self.names(*cell1)
        names2 = self.names(*cell2)
        for i, c1 in enumerate(vec1):
            if not c1:
                continue
            for j, c2 in enumerate(vec2):
                if not c2:
                    continue
                tab = self.deck.product(names1[i], names2[j])
                if tab is None:
                    return None, None
                for name, coeff in tab.items():
                    out[names_t.index(name)] += c1 * c2 * coeff
        orders = self.cells[(n, s)].orders if (n, s) in self.cells else ()
        if not names_t:
            return (n, s), ()
        return (n, s), tuple(self._reduce(out, orders))

    # -- record / closure ----------------------------------------------------------

    def _is_zero_vec(self, vec):
        return all(v == 0 for v in vec)

    def record(self, cell, vec, dvec, provenance, up_to_unit=False, trace=(),
               check=True, out_conseq=None):
        """Record d_page(vec) = dvec at cell; returns True if new information."""
        n, s = cell
        if cell not in self.cells:
            if self._is_zero_vec(dvec):
                return False
            raise EngineError(f"record at empty cell {cell}")
        target = (n - 1, s + self.page)
        cstate = self.cells[cell]
        if check and not cstate.z.contains(vec):
            raise NotACycle(f"{fmt_named(self.deck, cell, vec)} is not in Z_{self.page}")
        if not self._is_zero_vec(dvec):
            tstate = self.cells.get(target)
            if tstate is None:
                raise EngineError(f"target cell {target} is empty for {cell}")
            if check and not tstate.z.contains(dvec):
                raise NotACycle(
                    f"target {fmt_named(self.deck, target, dvec)} not in Z_{self.page}")
            if check and tstate.b.contains(dvec):
                raise TargetAlreadyBoundary(
                    f"target {fmt_named(self.deck, target, dvec)} is already a boundary")
        recs = self.diffs.setdefault(cell, [])
        known = self._evaluate_known(cell, vec)
        if known is not None:
            if not self._equiv_values(target, known, dvec, up_to_unit):
                raise InconsistentDifferential(
                    f"d{self.page}({fmt_named(self.deck, cell, vec)}): "
                    f"{fmt_named(self.deck, target, known) or '0'} vs "
                    f"{fmt_named(self.deck, target, dvec) or '0'}")
            return False
        recs.append(DiffRecord(tuple(vec), tuple(dvec), provenance, up_to_unit, trace))
        if out_conseq is not None:
            out_conseq.entries.append((cell, tuple(vec), tuple(dvec), provenance, trace))
        return True

    def _equiv_values(self, target, a, b, up_to_unit):
        tstate = self.cells.get(target)
        if tstate is None:
            return self._is_zero_vec(a) and self._is_zero_vec(b)
        diff = [x - y for x, y in zip(a, b)]
        if tstate.b.contains(diff):
            return True
        sm = [x + y for x, y in zip(a, b)]
        if tstate.b.contains(sm):
            return True  # signs are never pinned by the ambient chart convention
        if up_to_unit and self.ring.kind == "local":
            p = self.ring.p
            max_order = max((o for o in tstate.orders if o), default=0)
            for u in range(2, max_order):
                if u % p == 0:
                    continue
                cand = [x - u * y for x, y in zip(a, b)]
                if tstate.b.contains(cand):
                    return True
        return False

    def _evaluate_known(self, cell, vec):
        """Value of d on vec from recorded spans, None if not determined."""
        recs = self.diffs.get(cell, [])
        if not recs:
            return None
        cstate = self.cells[cell]
        cols = [dict(enumerate(map(Fraction, r.vec))) for r in recs]
        cols = [{i: v for i, v in c.items() if v} for c in cols]
        # modulo boundaries: d vanishes on B
        for g in cstate.b.gens:
            cols.append({i: Fraction(v) for i, v in enumerate(g) if v})
        for i, o in enumerate(cstate.orders):
            if o:
                cols.append({i: Fraction(o)})
        mat = SparseMatrix.from_columns(cols, len(cstate.orders))
        b = {i: Fraction(v) for i, v in enumerate(vec) if v}
        x = solve(mat, b, self.ring)
        if x is None:
            return None
        target = (cell[0] - 1, cell[1] + self.page)
        tnames = self.names(*target)
        out = [0] * len(tnames)
        exact = True
        for j, r in enumerate(recs):
            c = x.get(j, 0)
            if c:
                if r.up_to_unit:
                    exact = False
                for i, dv in enumerate(r.dvec):
                    out[i] += int(c) * dv
        if target in self.cells:
            out = self._reduce(out, self.cells[target].orders)
        return tuple(out)

    # -- the closure -----------------------------------------------------------------

    def close(self, conseq: ConsequenceSet | None = None, max_rounds: int = 60):
        """Leibniz + periodicity + division closure over recorded differentials."""
        self._leibniz_seen = getattr(self, "_leibniz_seen", set())
        for _ in range(max_rounds):
            changed = False
            changed |= self.determine_zero_by_degree()
            changed |= self._close_leibniz(conseq)
            changed |= self._close_division(conseq)
            if not changed:
                return

    def _pairs(self):
        out = []
        for cell, recs in self.diffs.items():
            for r in recs:
                out.append((cell, r))
        return out

    def _close_leibniz(self, conseq):
        changed = False
        pairs = self._pairs()
        for idx1, (c1, r1) in enumerate(pairs):
            for c2, r2 in pairs[idx1:]:
                key = (c1, r1.vec, r1.dvec, c2, r2.vec, r2.dvec)
                if key in self._leibniz_seen:
                    continue
                self._leibniz_seen.add(key)
                prod_cell, prod = self.product_vec(c1, r1.vec, c2, r2.vec)
                if prod is None or prod_cell not in self.cells:
                    continue
                if self._is_zero_vec(prod) and self._is_zero_vec(r1.dvec) \
                        and self._is_zero_vec(r2.dvec):
                    continue
                # d(xy) = d(x) y + (-1)^{n_x} x d(y)
                t1_cell, t1 = self.product_vec(
                    (c1[0] - 1, c1[1] + self.page), r1.dvec, c2, r2.vec)
                t2_cell, t2 = self.product_vec(
                    c1, r1.vec, (c2[0] - 1, c2[1] + self.page), r2.dvec)
                if t1 is None or t2 is None:
                    continue
                sign = -1 if c1[0] % 2 else 1
                tnames = self.names(prod_cell[0] - 1, prod_cell[1] + self.page)
                total = [0] * len(tnames)
                for i, v in enumerate(t1):
                    total[i] += v
                for i, v in enumerate(t2):
                    total[i] += sign * v
                tcell = (prod_cell[0] - 1, prod_cell[1] + self.page)
                if tcell in self.cells:
                    total = self._reduce(total, self.cells[tcell].orders)
                elif any(total):
                    raise EngineError(f"Leibniz value lands in empty cell {tcell}")
                try:
                    newinfo = self.record(
                        prod_cell, prod, tuple(total), "leibniz",
                        up_to_unit=r1.up_to_unit or r2.up_to_unit,
                        trace=(f"d({fmt_named(self.deck, c1, r1.vec)})",
                               f"d({fmt_named(self.deck, c2, r2.vec)})"),
                        check=False, out_conseq=conseq)
                except (NotACycle, TargetAlreadyBoundary):
                    newinfo = False
                changed |= newinfo
        return changed

    def _division_ops(self):
        """Classes usable for transport: permanent, or d-known-zero this page."""
        ops = list(self.deck.permanent)
        for op in self.deck.periodicity:
            if op.name in ops:
                continue
            c = self.deck.by_name[op.name]
            names = self.names(c.n, c.s)
            vec = tuple(1 if nm == op.name else 0 for nm in names)
            val = self._evaluate_known((c.n, c.s), vec)
            if val is not None and not any(val):
                ops.append(op.name)
        return ops

    def _close_division(self, conseq):
        """From d(pi.x) with pi permanent and pi-multiplication injective, get d(x)."""
        changed = False
        for op_name in self._division_ops():
            opc = self.deck.by_name[op_name]
            dn, ds = opc.n, opc.s
            for cell in list(self.cells):
                src = (cell[0] - dn, cell[1] - ds)
                if src not in self.cells or src == cell:
                    continue
                tgt_src = (src[0] - 1, src[1] + self.page)
                tgt_cell = (cell[0] - 1, cell[1] + self.page)
                if tgt_src not in self.cells:
                    continue
                # need injectivity of pi-multiplication on E_page at src and tgt_src
                if not self._op_injective(op_name, src, cell):
                    continue
                if not self._op_injective(op_name, tgt_src, tgt_cell):
                    continue
                for rec in list(self.diffs.get(cell, [])):
                    if self._is_zero_vec(rec.vec):
                        continue
                    x = self._divide_by_op(op_name, src, cell, rec.vec)
                    if x is None:
                        continue
                    if self._evaluate_known(src, x) is not None:
                        continue
                    if self._is_zero_vec(rec.dvec):
                        w = self._zero_target_vec(tgt_src)
                    else:
                        w = self._divide_by_op(op_name, tgt_src, tgt_cell, rec.dvec)
                        if w is None:
                            continue
                    try:
                        newinfo = self.record(
                            src, x, w, "division",
                            up_to_unit=rec.up_to_unit,
                            trace=(f"divide d({fmt_named(self.deck, cell, rec.vec)}) "
                                   f"by {op_name}",),
                            check=False, out_conseq=conseq)
                    except (NotACycle, TargetAlreadyBoundary):
                        newinfo = False
                    changed |= newinfo
        return changed

    def _op_matrix(self, op_name, src):
        """Columns of multiplication by op on ambient coordinates, or None."""
        opc = self.deck.by_name[op_name]
        cell = (src[0] + opc.n, src[1] + opc.s)
        names_s = self.names(*src)
        names_t = self.names(*cell)
        cols = []
        for nm in names_s:
            tab = self.deck.product(op_name, nm)
            if tab is None:
                return None
            col = {}
            for name, coeff in tab.items():
                col[names_t.index(name)] = coeff
            cols.append(col)
        return cols

    def _op_injective(self, op_name, src, cell):
        """Injectivity of op-multiplication on E_page at src (into cell)."""
        key = ("inj", op_name, src, self.page)
        if key in self._presentation_cache:
            return self._presentation_cache[key]
        cols = self._op_matrix(op_name, src)
        ok = False
        if cols is not None and cell in self.cells:
            cstate = self.cells[src]
            tstate = self.cells[cell]
            # ker(op) on E = {z in Z_src : op.z in B_cell}; injective iff that is B_src
            zgens = cstate.z.gens
            killed = []
            for g in zgens:
                img = [0] * len(tstate.orders)
                for i, gi in enumerate(g):
                    if gi:
                        for a, m in cols[i].items():
                            img[a] += gi * m
                img = self._reduce(img, tstate.orders)
                killed.append((g, img))
            # solve: combinations of z-gens whose image lies in B_cell
            imgcols = [dict(enumerate(map(Fraction, img))) for _, img in killed]
            imgcols = [{i: v for i, v in c.items() if v} for c in imgcols]
            bcols = [dict(enumerate(map(Fraction, g))) for g in tstate.b.gens]
            bcols = [{i: v for i, v in c.items() if v} for c in bcols]
            relcols = []
            for i, o in enumerate(tstate.orders):
                if o:
                    relcols.append({i: Fraction(o)})
            mat = SparseMatrix.from_columns(imgcols + bcols + relcols,
                                            len(tstate.orders))
            kern = kernel_basis(mat, self.ring)
            ok = True
            nz = len(zgens)
            from math import lcm

            for j in range(kern.cols):
                coeffs = kern.column(j)
                den = lcm(*[c.denominator for c in coeffs.values()]) if coeffs else 1
                vec = [0] * len(cstate.orders)
                hit = False
                for i, c in coeffs.items():
                    if i < nz and c:
                        hit = True
                        for a, ga in enumerate(cstate.z.gens[i]):
                            vec[a] += int(c * den) * ga
                if not hit:
                    continue
                vec = self._reduce(vec, cstate.orders)
                if any(vec) and not cstate.b.contains(vec):
                    ok = False
                    break
        self._presentation_cache[key] = ok
        return ok

    def _divide_by_op(self, op_name, src, cell, vec):
        """x at src with op.x = vec (mod B at cell), or None."""
        cols = self._op_matrix(op_name, src)
        if cols is None:
            return None
        cstate = self.cells[src]
        tstate = self.cells[cell]
        mcols = []
        for i in range(len(cstate.orders)):
            mcols.append({a: Fraction(m) for a, m in cols[i].items()})
        bcols = [dict(enumerate(map(Fraction, g))) for g in tstate.b.gens]
        bcols = [{i: v for i, v in c.items() if v} for c in bcols]
        relcols = []
        for i, o in enumerate(tstate.orders):
            if o:
                relcols.append({i: Fraction(o)})
        mat = SparseMatrix.from_columns(mcols + bcols + relcols, len(tstate.orders))
        b = {i: Fraction(v) for i, v in enumerate(vec) if v}
        x = solve(mat, b, self.ring)
        if x is None:
            return None
        out = [0] * len(cstate.orders)
        for i in range(len(cstate.orders)):
            c = x.get(i, 0)
            if c:
                out[i] = int(c)
        out = self._reduce(out, cstate.orders)
        if not cstate.z.contains(out):
            return None
        return tuple(out)

    def _zero_target_vec(self, src):
        tgt = (src[0] - 1, src[1] + self.page)
        return (0,) * len(self.names(*tgt))

    # -- public operations -------------------------------------------------------------

    def apply_differential(self, r, source_combo, target_combo, dry_run=False,
                           up_to_unit=False, provenance="atomic"):
        if r != self.page:
            raise EngineError(f"state is at page {self.page}, not {r}")
        import copy

        work = self if not dry_run else copy.deepcopy(self)
        cell, vec = work.combo_to_vec(source_combo)
        conseq = ConsequenceSet(r, [])
        if target_combo:
            tcell, tvec = work.combo_to_vec(target_combo)
            if tcell != (cell[0] - 1, cell[1] + r):
                raise EngineError("target bidegree does not match the differential")
        else:
            tvec = work._zero_target_vec(cell)
        work.record(cell, vec, tvec, provenance, up_to_unit=up_to_unit,
                    out_conseq=conseq)
        work.close(conseq)
        return conseq

    def determine_zero_by_degree(self):
        """Record d = 0 where the source or target group vanishes on this page."""
        changed = False
        for (n, s), cstate in self.cells.items():
            target = (n - 1, s + self.page)
            tstate = self.cells.get(target)
            target_zero = tstate is None or self._page_group_trivial(target)
            if not target_zero:
                continue
            for g in cstate.z.gens:
                if self._evaluate_known((n, s), g) is None:
                    changed |= self.record((n, s), g, self._zero_target_vec((n, s)),
                                           "zero-by-degree", check=False)
        return changed

    def _page_group_trivial(self, cell):
        key = ("triv", cell, self.page, len(self.cells[cell].z.gens),
               len(self.cells[cell].b.gens))
        if key in self._presentation_cache:
            return self._presentation_cache[key]
        cstate = self.cells[cell]
        group, _, _ = cstate.z.quotient_by(cstate.b)
        out = group.is_trivial()
        self._presentation_cache[key] = out
        return out

    def page_group(self, n, s) -> AbelianGroupPresentation:
        cell = self.cells.get((n, s))
        if cell is None:
            return AbelianGroupPresentation(self.ring, 0, (), ())
        key = ("grp", n, s, self.page, len(cell.z.gens), len(cell.b.gens))
        if key in self._presentation_cache:
            return self._presentation_cache[key]
        group, _, _ = cell.z.quotient_by(cell.b)
        self._presentation_cache[key] = group
        return group

    def undetermined_cells(self):
        out = []
        for (n, s), cstate in self.cells.items():
            for g in cstate.z.gens:
                if self._evaluate_known((n, s), g) is None:
                    out.append((n, s))
                    break
        return out

    def turn_page(self, assume_zero=False):
        """Advance to page r+1; Z' = ker d_r, B' = B_r + im d_r."""
        self.determine_zero_by_degree()
        undet = self.undetermined_cells()
        if undet and not assume_zero:
            raise UnderdeterminedPage(undet)
        if undet and assume_zero:
            for cell in undet:
                cstate = self.cells[cell]
                for g in cstate.z.gens:
                    if self._evaluate_known(cell, g) is None:
                        self.record(cell, g, self._zero_target_vec(cell),
                                    "meta-leibniz-complete", check=False)
        new_z = {}
        new_b = {}
        for cell, cstate in self.cells.items():
            n, s = cell
            target = (n - 1, s + self.page)
            # kernel of d on Z_r modulo B at target
            zgens = cstate.z.gens
            imgs = []
            for g in zgens:
                val = self._evaluate_known(cell, g)
                if val is None:
                    raise UnderdeterminedPage([cell])
                imgs.append(val)
            tstate = self.cells.get(target)
            if tstate is None or not any(any(v) for v in imgs):
                kz = cstate.z
            else:
                icols = [dict(enumerate(map(Fraction, v))) for v in imgs]
                icols = [{i: v for i, v in c.items() if v} for c in icols]
                bcols = [dict(enumerate(map(Fraction, g))) for g in tstate.b.gens]
                bcols = [{i: v for i, v in c.items() if v} for c in bcols]
                rel = []
                for i, o in enumerate(tstate.orders):
                    if o:
                        rel.append({i: Fraction(o)})
                mat = SparseMatrix.from_columns(icols + bcols + rel,
                                                len(tstate.orders))
                kern = kernel_basis(mat, self.ring)
                gens = []
                k = len(zgens)
                for j in range(kern.cols):
                    col = kern.column(j)
                    # unit denominators may appear; scaling a generator by a
                    # unit does not change the lattice it spans
                    from math import lcm

                    den = lcm(*[c.denominator for c in col.values()]) if col else 1
                    vec = [0] * len(cstate.orders)
                    hit = False
                    for i, c in col.items():
                        if i < k and c:
                            hit = True
                            for a, ga in enumerate(zgens[i]):
                                vec[a] += int(c * den) * ga
                    if hit:
                        gens.append(tuple(self._reduce(vec, cstate.orders)))
                # also anything of Z that maps into B via zero coefficients
                kz = SubgroupLattice(self.ring, cstate.orders, tuple(gens)).sum(cstate.b)
            new_z[cell] = kz
        for cell, cstate in self.cells.items():
            n, s = cell
            source = (n + 1, s - self.page)
            b = cstate.b
            sstate = self.cells.get(source)
            if sstate is not None:
                vals = []
                for g in sstate.z.gens:
                    val = self._evaluate_known(source, g)
                    if val is not None and any(val):
                        vals.append(val)
                if vals:
                    b = b.add_vectors(vals)
            new_b[cell] = b
        for cell in self.cells:
            self.cells[cell].z = new_z[cell]
            self.cells[cell].b = new_b[cell]
        self.page += 1
        self.diffs = {}
        self._presentation_cache = {}
        self._leibniz_seen = set()
        self._mark_permanent()

    def state_signature(self):
        """Hashable fingerprint of the page data, for undo checks and tests."""
        items = []
        for cell in sorted(self.cells):
            c = self.cells[cell]
            items.append((cell, tuple(sorted(c.z.gens)), tuple(sorted(c.b.gens))))
        diff_items = []
        for cell in sorted(self.diffs):
            for r in self.diffs[cell]:
                diff_items.append((cell, r.vec, r.dvec))
        return (self.page, tuple(items), tuple(sorted(diff_items)))
