"""Generation of the curated decks.

Deck data is transcription: additive generators per bidegree with a partial
product table, periodicity declarations and the atomic differential
schedule.  The connective regions are generated from monomial families and
checked against the computed cohomology tables; the nonconnective regions
follow the localization structure (boundary classes [x] for monomials
needing both inversions, torsion translates <x D^-k>, and the glued
filtration-1 classes whose unit multiples hit [x]).

Names avoid '*' and '-': inverse powers are written with 'm', e.g. Dm2 for
the (-2)-nd power of the discriminant class.
"""

from __future__ import annotations

from dataclasses import dataclass

from .deck import DeckClass, E2Deck, PeriodicityOp, ScheduleEntry
from .ring import CoefficientRing


def mono_name(exps: dict) -> str:
    """Canonical name for a monomial family member; 'one' for the unit."""
    parts = []
    for var in sorted(exps):
        e = exps[var]
        if e == 0:
            continue
        if e == 1:
            parts.append(var)
        elif e > 1:
            parts.append(f"{var}^{e}")
        else:
            parts.append(f"{var}m{-e}")
    return "".join(parts) or "one"


@dataclass(frozen=True)
class Mono:
    """Monomial in named family variables with integer exponents."""

    exps: tuple  # sorted tuple of (var, exp)

    @staticmethod
    def of(**exps):
        return Mono(tuple(sorted((v, e) for v, e in exps.items() if e)))

    def get(self, var):
        return dict(self.exps).get(var, 0)

    def times(self, **delta):
        d = dict(self.exps)
        for v, e in delta.items():
            d[v] = d.get(v, 0) + e
        return Mono(tuple(sorted((v, e) for v, e in d.items() if e)))

    @property
    def name(self):
        return mono_name(dict(self.exps))


# ---------------------------------------------------------------------------
# p = 3


P3_DEGREES = {"c4": (8, 0), "c6": (12, 0), "D": (24, 0), "al": (3, 1), "be": (10, 2)}


def p3_bidegree(m: Mono):
    n = sum(P3_DEGREES[v][0] * e for v, e in m.exps)
    s = sum(P3_DEGREES[v][1] * e for v, e in m.exps)
    return n, s


def build_p3_deck(window=(-60, 72, 18)) -> E2Deck:
    ring = CoefficientRing.local(3)
    n_min, n_max, s_max = window
    deck = E2Deck(ring, window, [])
    monos = []

    def add(m: Mono, order, region="connective"):
        n, s = p3_bidegree(m)
        if not (n_min <= n <= n_max and 0 <= s <= s_max):
            return False
        deck.add_class(DeckClass(m.name, n, s, order, region))
        monos.append((m, order))
        return True

    # free part: c4^i c6^e D^k, e <= 1 via c6^2 = c4^3 - 1728 D
    for k in range((n_max // 24) + 1):
        for e in (0, 1):
            i = 0
            while True:
                if not add(Mono.of(c4=i, c6=e, D=k), 0) and 8 * i > n_max:
                    break
                i += 1
    # torsion: al^e be^j D^k, F_3 each
    for k in range((n_max // 24) + 1):
        for e in (0, 1):
            j = 0
            while True:
                if e == 0 and j == 0:
                    j += 1
                    continue
                ok = add(Mono.of(al=e, be=j, D=k), 3)
                if not ok and 10 * j > n_max:
                    break
                j += 1
    # nonconnective: [c4^-I c6^e D^-K] boundary classes (free), I,K >= 1,
    # glued with al D^-K when e = 1, I = 1 into a single free class
    for I in range(1, 8):
        for K in range(1, (abs(n_min) // 24) + 2):
            for e in (0, 1):
                n = -8 * I + 12 * e - 24 * K - 1
                if not (n_min <= n <= n_max):
                    continue
                if e == 1 and I == 1:
                    # [1/3 c4m1 c6 DmK]: triples to the plain boundary class
                    deck.add_class(DeckClass(f"[1/3c4m1c6Dm{K}]", n, 1, 0,
                                             "nonconnective"))
                else:
                    m = Mono.of(c4=-I, c6=e, D=-K)
                    deck.add_class(DeckClass(f"[{m.name}]", n, 1, 0, "nonconnective"))
    # nonconnective torsion translates <al^e be^j DmK>; al DmK glued above
    for K in range(1, (abs(n_min) // 24) + 2):
        for e in (0, 1):
            for j in range(0, s_max // 2 + 1):
                if e == 0 and j == 0:
                    continue
                if e == 1 and j == 0:
                    continue  # glued into the [1/3 ...] class
                m = Mono.of(al=e, be=j, D=-K)
                n, s = p3_bidegree(m)
                if not (n_min <= n <= n_max and 0 <= s <= s_max):
                    continue
                deck.add_class(DeckClass(f"<{m.name}>", n, s, 3, "nonconnective"))

    _p3_products(deck, monos)
    deck.permanent[:] = ["one", "al", "be"]
    # Delta itself supports a d5; Delta^3 is the usable translation operator
    deck.periodicity[:] = [
        PeriodicityOp("D^3", n_min, n_max - 72, 0, s_max),
        PeriodicityOp("be", n_min, n_max - 10, 0, s_max - 2),
    ]
    deck.schedule[:] = [
        ScheduleEntry(5, {"D": 1}, {"albe^2": 1}, up_to_unit=True),
        ScheduleEntry(9, {"alD^2": 1}, {"be^5": 1}, up_to_unit=True),
    ]
    deck.aliases.update({"al": "alpha", "be": "beta", "c4": "c4", "c6": "c6",
                         "D": "Delta", "one": "one"})
    deck.ledger_file = "p3.ledger"
    deck.validate()
    return deck


def _p3_products(deck: E2Deck, monos):
    """Products of the small multipliers with every class, plus gluing rules."""
    by_name = {m.name: (m, order) for m, order in monos}

    def set_if(a, b, value):
        if a in deck.by_name and b in deck.by_name:
            ok = all(v in deck.by_name for v in value)
            if ok:
                deck.set_product(a, b, value)

    multipliers = {
        "one": {},
        "al": {"al": 1},
        "be": {"be": 1},
        "D": {"D": 1},
        "c4": {"c4": 1},
        "c6": {"c6": 1},
    }
    for name, (m, order) in list(by_name.items()):
        for mult, delta in multipliers.items():
            if mult not in deck.by_name:
                continue
            target = m.times(**delta)
            # relations: al^2 = 0; c4,c6 kill torsion; c6^2 = c4^3 - 1728 D
            if target.get("al") >= 2:
                set_if(mult, name, {})
                continue
            if (target.get("al") or target.get("be")) and (
                    target.get("c4") or target.get("c6")):
                set_if(mult, name, {})
                continue
            if target.get("c6") >= 2:
                a = target.times(c6=-2, c4=3)
                b = target.times(c6=-2, D=1)
                if a.name in deck.by_name and b.name in deck.by_name:
                    set_if(mult, name, {a.name: 1, b.name: -1728})
                continue
            if target.name in deck.by_name:
                set_if(mult, name, {target.name: 1})
            else:
                tn, ts = p3_bidegree(target)
                if deck.in_window(tn, ts) and not deck.cell_names(tn, ts):
                    set_if(mult, name, {})
                # otherwise out of window or ambiguous: leave undeclared
    # nonconnective products: D- and be-multiplication on translates
    for c in list(deck.classes):
        if c.region != "nonconnective":
            continue
        inner = c.name.strip("[]<>")
        glued = inner.startswith("1/3")
        if glued:
            K = int(inner.split("Dm")[1].rstrip("]"))
            # D.xi_K = xi_{K-1} (both triple to the matching boundary class);
            # D.xi_1 is the alpha class itself
            tname = "al" if K == 1 else f"[1/3c4m1c6Dm{K - 1}]"
            if tname in deck.by_name:
                deck.set_product("D", c.name, {tname: 1})
            continue
        m = Mono(tuple(
            (v, e) for v, e in _parse_mono(inner).items() if e
        ))
        bracket = c.name[0] == "["
        for mult, delta in (("D", {"D": 1}), ("be", {"be": 1}), ("al", {"al": 1})):
            target = m.times(**delta)
            if target.get("al") >= 2:
                deck.set_product(mult, c.name, {})
                continue
            tname = _p3_name_for(deck, target, bracket)
            if tname is not None:
                deck.set_product(mult, c.name, tname)


def _p3_name_for(deck, m: Mono, bracket: bool):
    """Deck name holding the monomial m, respecting gluing; None if absent."""
    if bracket:
        # boundary classes multiply by monomial bookkeeping; leaving the
        # doubly-negative locus kills the class
        if m.get("al") or m.get("be"):
            return {}
        if m.get("c4") >= 0 or m.get("D") >= 0:
            return {}
        if m.get("c4") == -1 and m.get("c6") == 1:
            K = -m.get("D")
            name = f"[1/3c4m1c6Dm{K}]"
            return {name: 3} if name in deck.by_name else None
        name = f"[{m.name}]"
        return {name: 1} if name in deck.by_name else None
    K = -m.get("D")
    if K <= 0:
        # back into the connective range
        name = m.name
        return {name: 1} if name in deck.by_name else ({} if _p3_in(deck, m) else None)
    if m.get("al") == 1 and m.get("be") == 0:
        name = f"[1/3c4m1c6Dm{K}]"
        return {name: 1} if name in deck.by_name else None
    name = f"<{m.name}>"
    return {name: 1} if name in deck.by_name else None


def _p3_in(deck, m):
    n, s = p3_bidegree(m)
    return deck.in_window(n, s)


def _parse_mono(text: str, vars_sorted=("al", "be", "c4", "c6", "D")) -> dict:
    """Inverse of mono_name for family variables."""
    out: dict = {}
    i = 0
    while i < len(text):
        matched = None
        for v in vars_sorted:
            if text.startswith(v, i):
                matched = v
                break
        if matched is None:
            raise ValueError(f"cannot parse monomial name {text!r} at {i}")
        i += len(matched)
        exp = 1
        if i < len(text) and text[i] == "^":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            exp = int(text[i + 1:j])
            i = j
        elif i < len(text) and text[i] == "m":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j > i + 1:
                exp = -int(text[i + 1:j])
                i = j
        out[matched] = out.get(matched, 0) + exp
    return out


# ---------------------------------------------------------------------------
# Z[1/6]


def build_z16_deck(window=(-60, 72, 2)) -> E2Deck:
    ring = CoefficientRing.invert([2, 3])
    n_min, n_max, s_max = window
    deck = E2Deck(ring, window, [])
    for k in range(n_max // 24 + 1):
        for e in (0, 1):
            i = 0
            while 8 * i + 12 * e + 24 * k <= n_max:
                deck.add_class(DeckClass(mono_name({"c4": i, "c6": e, "D": k}),
                                         8 * i + 12 * e + 24 * k, 0, 0))
                i += 1
    # negative stems: [c4^-i c6^e D^-k], i,k >= 1, filtration 1
    for I in range(1, 10):
        for K in range(1, abs(n_min) // 24 + 2):
            for e in (0, 1):
                n = -8 * I + 12 * e - 24 * K - 1
                if n_min <= n <= n_max:
                    name = f"[{mono_name({'c4': -I, 'c6': e, 'D': -K})}]"
                    deck.add_class(DeckClass(name, n, 1, 0, "nonconnective"))
    one = "one"
    for c in deck.classes:
        if one in deck.by_name:
            deck.set_product(one, c.name, {c.name: 1})
    deck.permanent[:] = [one]
    deck.validate()
    return deck
