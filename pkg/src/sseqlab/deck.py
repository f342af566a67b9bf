"""Deck files: curated E2 data driving a spectral sequence run.

Sections: [ring], [window], [generators], [permanent], [products],
[periodicity], [schedule], [aliases], [ledger].  Generators are additive:
one named cyclic summand per line.  Products give the bilinear partial
multiplication table on generator names.  The schedule lists atomic
differentials per page; `pm` marks a target defined up to a unit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .ring import CoefficientRing


class DeckError(Exception):
    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class DeckClass:
    name: str
    n: int
    s: int
    order: int  # 0 = free, else a prime power
    region: str = "connective"


@dataclass
class PeriodicityOp:
    name: str  # generator to multiply by
    n_min: int
    n_max: int
    s_min: int
    s_max: int

    def applies(self, n: int, s: int) -> bool:
        return self.n_min <= n <= self.n_max and self.s_min <= s <= self.s_max


@dataclass
class ScheduleEntry:
    page: int
    source: dict  # name -> int coefficient
    target: dict  # name -> int coefficient (empty = zero)
    up_to_unit: bool = False

    def describe(self) -> str:
        return f"d{self.page}({fmt_combo(self.source)}) = " + (
            ("+-" if self.up_to_unit else "") + (fmt_combo(self.target) or "0")
        )


@dataclass
class E2Deck:
    ring: CoefficientRing
    window: tuple  # (n_min, n_max, s_max)
    classes: list = field(default_factory=list)
    products: dict = field(default_factory=dict)  # (name1, name2) sorted -> {name: coeff}
    permanent: list = field(default_factory=list)
    periodicity: list = field(default_factory=list)
    schedule: list = field(default_factory=list)
    aliases: dict = field(default_factory=dict)
    ledger_file: str | None = None

    def __post_init__(self):
        self.by_name = {}
        self.by_bidegree = {}
        for c in self.classes:
            if c.name in self.by_name:
                raise DeckError(f"duplicate generator name {c.name}")
            self.by_name[c.name] = c
            self.by_bidegree.setdefault((c.n, c.s), []).append(c.name)

    def add_class(self, c: DeckClass):
        if c.name in self.by_name:
            raise DeckError(f"duplicate generator name {c.name}")
        self.classes.append(c)
        self.by_name[c.name] = c
        self.by_bidegree.setdefault((c.n, c.s), []).append(c.name)

    def cell_names(self, n: int, s: int) -> list:
        return self.by_bidegree.get((n, s), [])

    def cell_orders(self, n: int, s: int) -> tuple:
        return tuple(self.by_name[x].order for x in self.cell_names(n, s))

    def in_window(self, n: int, s: int) -> bool:
        return self.window[0] <= n <= self.window[1] and 0 <= s <= self.window[2]

    def product(self, a: str, b: str):
        """{name: coeff} or None when the product is not declared."""
        key = (a, b) if a <= b else (b, a)
        return self.products.get(key)

    def set_product(self, a: str, b: str, value: dict):
        key = (a, b) if a <= b else (b, a)
        ca, cb = self.by_name[a], self.by_name[b]
        for name, coeff in value.items():
            cc = self.by_name.get(name)
            if cc is None:
                raise DeckError(f"product {a}*{b} references unknown {name}")
            if (cc.n, cc.s) != (ca.n + cb.n, ca.s + cb.s):
                raise DeckError(
                    f"product {a}*{b} lands in {(cc.n, cc.s)}, expected "
                    f"{(ca.n + cb.n, ca.s + cb.s)}"
                )
        self.products[key] = dict(value)

    def validate(self):
        for entry in self.schedule:
            for combo in (entry.source, entry.target):
                for name in combo:
                    if name not in self.by_name:
                        raise DeckError(f"schedule references unknown class {name}")
            src = _combo_bidegree(self, entry.source)
            if entry.target:
                tgt = _combo_bidegree(self, entry.target)
                if tgt != (src[0] - 1, src[1] + entry.page):
                    raise DeckError(
                        f"{entry.describe()}: target bidegree {tgt} does not match "
                        f"({src[0] - 1}, {src[1] + entry.page})"
                    )
        pages = [e.page for e in self.schedule]
        if pages != sorted(pages):
            raise DeckError("schedule pages must be nondecreasing")
        for op in self.periodicity:
            if op.name not in self.by_name:
                raise DeckError(f"periodicity operator {op.name} is not a generator")
        for name in self.permanent:
            if name not in self.by_name:
                raise DeckError(f"permanent class {name} is not a generator")


def _combo_bidegree(deck: E2Deck, combo: dict):
    degs = {(deck.by_name[x].n, deck.by_name[x].s) for x in combo}
    if len(degs) != 1:
        raise DeckError(f"mixed bidegrees in {fmt_combo(combo)}")
    return degs.pop()


NAME_RE = r"[A-Za-z0-9_^*/\.\[\]<>'-]+"


def parse_combo(text: str, line_no=None) -> tuple:
    """'2*x + y - z' -> ({x: 2, y: 1, z: -1}, up_to_unit)."""
    text = text.strip()
    up_to_unit = False
    if text.startswith("pm "):
        up_to_unit = True
        text = text[3:].strip()
    if text in ("0", ""):
        return {}, up_to_unit
    combo: dict = {}
    for sign, chunk in re.findall(r"([+-]?)\s*([^+-]+)", text):
        chunk = chunk.strip()
        if not chunk:
            continue
        m = re.fullmatch(rf"(?:(\d+)\*)?({NAME_RE})", chunk)
        if not m:
            raise DeckError(f"cannot parse term {chunk!r}", line_no)
        coeff = int(m.group(1) or 1) * (-1 if sign == "-" else 1)
        name = m.group(2)
        combo[name] = combo.get(name, 0) + coeff
    return {k: v for k, v in combo.items() if v}, up_to_unit


def fmt_combo(combo: dict) -> str:
    parts = []
    for name in sorted(combo):
        c = combo[name]
        if c == 1:
            parts.append(name)
        elif c == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"{c}*{name}")
    return " + ".join(parts).replace("+ -", "- ")


def parse_deck(text: str) -> E2Deck:
    ring = None
    window = None
    classes = []
    products = []
    permanent = []
    periodicity = []
    schedule = []
    aliases = {}
    ledger_file = None
    section = None
    current_page = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            continue
        if section == "ring":
            parts = line.split()
            if parts[0] == "local":
                ring = CoefficientRing.local(int(parts[1]))
            elif parts[0] == "field":
                ring = CoefficientRing.prime_field(int(parts[1]))
            elif parts[0] == "invert":
                ring = CoefficientRing.invert([int(x) for x in parts[1:]])
            else:
                raise DeckError(f"unknown ring kind {parts[0]}", line_no)
        elif section == "window":
            a, b, c = line.split()
            window = (int(a), int(b), int(c))
        elif section == "generators":
            parts = line.split()
            if len(parts) not in (4, 5):
                raise DeckError("generator lines: name n s order [region]", line_no)
            name, n, s, order = parts[:4]
            region = parts[4] if len(parts) == 5 else "connective"
            if region not in ("connective", "nonconnective"):
                raise DeckError(f"unknown region {region}", line_no)
            classes.append(DeckClass(name, int(n), int(s), int(order), region))
        elif section == "permanent":
            permanent.extend(line.split())
        elif section == "products":
            m = re.fullmatch(rf"({NAME_RE})\s*\*\s*({NAME_RE})\s*=\s*(.*)", line)
            if not m:
                raise DeckError(f"cannot parse product line {line!r}", line_no)
            combo, _ = parse_combo(m.group(3), line_no)
            products.append((m.group(1), m.group(2), combo, line_no))
        elif section == "periodicity":
            parts = line.split()
            if len(parts) != 5:
                raise DeckError("periodicity lines: name nmin nmax smin smax", line_no)
            periodicity.append(PeriodicityOp(parts[0], int(parts[1]), int(parts[2]),
                                             int(parts[3]), int(parts[4])))
        elif section == "schedule":
            if line.startswith("page"):
                current_page = int(line.split()[1])
                continue
            m = re.fullmatch(r"d:\s*(.*?)\s*->\s*(.*)", line)
            if not m or current_page is None:
                raise DeckError(f"cannot parse schedule line {line!r}", line_no)
            source, up1 = parse_combo(m.group(1), line_no)
            target, up2 = parse_combo(m.group(2), line_no)
            schedule.append(ScheduleEntry(current_page, source, target, up1 or up2))
        elif section == "aliases":
            key, _, value = line.partition("=")
            aliases[key.strip()] = value.strip()
        elif section == "ledger":
            ledger_file = line.strip()
        else:
            raise DeckError(f"content outside a known section: {line!r}", line_no)
    if ring is None or window is None:
        raise DeckError("deck needs [ring] and [window] sections")
    deck = E2Deck(ring, window, classes, {}, permanent, periodicity, schedule,
                  aliases, ledger_file)
    for a, b, combo, line_no in products:
        try:
            deck.set_product(a, b, combo)
        except DeckError as e:
            raise DeckError(str(e), line_no) from None
    deck.validate()
    return deck


def serialize_deck(deck: E2Deck) -> str:
    out = ["[ring]"]
    r = deck.ring
    if r.kind == "local":
        out.append(f"local {r.p}")
    elif r.kind == "field":
        out.append(f"field {r.p}")
    else:
        out.append("invert " + " ".join(str(q) for q in sorted(r.inverted)))
    out.append("")
    out.append("[window]")
    out.append(f"{deck.window[0]} {deck.window[1]} {deck.window[2]}")
    out.append("")
    out.append("[generators]")
    for c in deck.classes:
        out.append(f"{c.name} {c.n} {c.s} {c.order} {c.region}")
    if deck.permanent:
        out.append("")
        out.append("[permanent]")
        out.append(" ".join(deck.permanent))
    out.append("")
    out.append("[products]")
    for (a, b), combo in sorted(deck.products.items()):
        out.append(f"{a} * {b} = {fmt_combo(combo) or '0'}")
    if deck.periodicity:
        out.append("")
        out.append("[periodicity]")
        for op in deck.periodicity:
            out.append(f"{op.name} {op.n_min} {op.n_max} {op.s_min} {op.s_max}")
    if deck.schedule:
        out.append("")
        out.append("[schedule]")
        page = None
        for e in deck.schedule:
            if e.page != page:
                page = e.page
                out.append(f"page {page}")
            prefix = "pm " if e.up_to_unit else ""
            out.append(f"d: {fmt_combo(e.source)} -> {prefix}{fmt_combo(e.target) or '0'}")
    if deck.aliases:
        out.append("")
        out.append("[aliases]")
        for k, v in sorted(deck.aliases.items()):
            out.append(f"{k} = {v}")
    if deck.ledger_file:
        out.append("")
        out.append("[ledger]")
        out.append(deck.ledger_file)
    return "\n".join(out) + "\n"
