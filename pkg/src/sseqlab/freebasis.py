"""Normal forms in a quotient ring that is module-finite over its coefficients.

Term rewriting with the two rank-8 relations does not terminate (s^4 t and
s t^2 feed each other with shrinking coefficients), so normal forms are
computed through multiplication matrices instead: for every module generator
x and basis monomial m the product x.m is expressed in the basis by solving a
small linear system per internal degree, and arbitrary monomials reduce by
folding these structure constants.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import GradedRing, Poly


class BasisClosureError(Exception):
    pass


def _mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


class ModuleBasisNormalizer:
    """Normalizer for a GradedRing presented as a free module over a subring.

    `module_vars` index the generators whose monomials form the module basis
    (capped exponents); the remaining variables are coefficients.  `relations`
    are (lead mono, replacement terms dict) with pure-power leads in the
    module variables and unit lead coefficient.
    """

    def __init__(self, ring: GradedRing, module_vars: list, caps: dict, relations: list):
        self.ring = ring
        self.module_vars = list(module_vars)
        self.caps = dict(caps)  # var index -> max exponent
        self.relations = relations
        self.nf: dict = {}  # non-basis monomial -> {basis mono (module part only): A-poly terms}
        self._memo: dict = {}
        self._build()

    # module-part / coefficient-part split -----------------------------------

    def _split(self, mono):
        mod = [0] * self.ring.nvars
        coef = list(mono)
        for i in self.module_vars:
            mod[i] = mono[i]
            coef[i] = 0
        return tuple(mod), tuple(coef)

    def _is_basis(self, mod_mono) -> bool:
        return all(mod_mono[i] <= self.caps[i] for i in self.module_vars)

    def _basis_monomials(self):
        out = [tuple([0] * self.ring.nvars)]
        for i in self.module_vars:
            new = []
            for m in out:
                for e in range(self.caps[i] + 1):
                    mm = list(m)
                    mm[i] = e
                    new.append(tuple(mm))
            out = new
        return out

    # closure and solve -------------------------------------------------------

    def _raw_equation(self, mono):
        """mono = sum of terms, via the relation whose lead divides it."""
        for lead, repl in self.relations:
            if all(mono[i] >= lead[i] for i in range(len(lead))):
                rest = tuple(a - b for a, b in zip(mono, lead))
                return {(_mono_mul(rest, rm)): rc for rm, rc in repl.items()}
        raise BasisClosureError(f"no relation reduces {mono}")

    def _build(self):
        basis = self._basis_monomials()
        needed = set()
        for i in self.module_vars:
            for m in basis:
                mm = list(m)
                mm[i] += 1
                mod, _ = self._split(tuple(mm))
                if not self._is_basis(mod):
                    needed.add(mod)
        equations = {}
        work = list(needed)
        guard = 0
        while work:
            guard += 1
            if guard > 10000:
                raise BasisClosureError("closure did not stabilize")
            m = work.pop()
            if m in equations:
                continue
            eq = self._raw_equation(m)
            equations[m] = eq
            for term in eq:
                mod, _ = self._split(term)
                if not self._is_basis(mod) and mod not in equations and mod not in work:
                    # equations are indexed by pure module monomials
                    work.append(mod)
        # the recorded equation for a module monomial must itself be keyed on
        # the pure module monomial; re-derive for those
        equations = {m: self._raw_equation(m) for m in equations}
        by_degree: dict = {}
        for m in equations:
            by_degree.setdefault(self.ring.mono_degree(m), []).append(m)
        for deg in sorted(by_degree):
            self._solve_degree(by_degree[deg], equations)

    def _solve_degree(self, unknowns, equations):
        k = len(unknowns)
        index = {m: i for i, m in enumerate(unknowns)}
        coeff = [[Fraction(0)] * k for _ in range(k)]
        rhs = [dict() for _ in range(k)]
        for m in unknowns:
            i = index[m]
            for term, c in equations[m].items():
                mod, coef = self._split(term)
                if self._is_basis(mod):
                    key = (mod, coef)
                    rhs[i][key] = rhs[i].get(key, Fraction(0)) + c
                elif mod in index:
                    if any(coef):
                        raise BasisClosureError("same-degree unknown with coefficient")
                    coeff[i][index[mod]] += c
                else:
                    # strictly lower degree: already solved
                    solved = self.nf[mod]
                    for (bmod, bcoef), bc in solved.items():
                        key = (bmod, _mono_mul(bcoef, coef))
                        rhs[i][key] = rhs[i].get(key, Fraction(0)) + c * bc
        # solve (I - C) x = rhs by Gaussian elimination over Fractions
        mat = [[(Fraction(1) if a == b else Fraction(0)) - coeff[a][b] for b in range(k)]
               for a in range(k)]
        sol = _solve_linear(mat, rhs)
        for m, value in zip(unknowns, sol):
            self.nf[m] = {key: c for key, c in value.items() if c != 0}

    # public API ---------------------------------------------------------------

    def reduce_module_monomial(self, mod_mono) -> dict:
        """Normal form of a pure module monomial: {(basis mono, coef mono): c}."""
        if self._is_basis(mod_mono):
            return {(mod_mono, tuple([0] * self.ring.nvars)): Fraction(1)}
        if mod_mono in self._memo:
            return self._memo[mod_mono]
        if mod_mono in self.nf:
            return self.nf[mod_mono]
        # peel one variable and fold through solved structure constants
        i = next(i for i in self.module_vars if mod_mono[i] > self.caps[i])
        one_less = list(mod_mono)
        one_less[i] -= 1
        inner = self.reduce_module_monomial(tuple(one_less))
        out: dict = {}
        for (bmod, bcoef), c in inner.items():
            lifted = list(bmod)
            lifted[i] += 1
            lifted = tuple(lifted)
            sub = self.reduce_module_monomial(self._split(lifted)[0])
            for (bm2, bc2), c2 in sub.items():
                key = (bm2, _mono_mul(bcoef, bc2))
                out[key] = out.get(key, Fraction(0)) + c * c2
        out = {key: c for key, c in out.items() if c != 0}
        self._memo[mod_mono] = out
        return out

    def __call__(self, poly: Poly) -> Poly:
        terms: dict = {}
        for mono, c in poly.terms.items():
            mod, coef = self._split(mono)
            for (bmod, bcoef), c2 in self.reduce_module_monomial(mod).items():
                key = _mono_mul(_mono_mul(bmod, bcoef), coef)
                v = terms.get(key, Fraction(0)) + c * c2
                if v == 0:
                    terms.pop(key, None)
                else:
                    terms[key] = v
        return Poly(poly.ring, terms)


def _solve_linear(mat, rhs):
    """Solve mat . x = rhs where rhs entries are dict-valued (formal sums)."""
    k = len(mat)
    mat = [row[:] for row in mat]
    rhs = [dict(r) for r in rhs]
    for col in range(k):
        piv = next((r for r in range(col, k) if mat[r][col] != 0), None)
        if piv is None:
            raise BasisClosureError("singular structure-constant system")
        mat[col], mat[piv] = mat[piv], mat[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = Fraction(1) / mat[col][col]
        mat[col] = [x * inv for x in mat[col]]
        rhs[col] = {key: c * inv for key, c in rhs[col].items()}
        for r in range(k):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
                acc = dict(rhs[r])
                for key, c in rhs[col].items():
                    acc[key] = acc.get(key, Fraction(0)) - f * c
                rhs[r] = {key: c for key, c in acc.items() if c != 0}
    return rhs
