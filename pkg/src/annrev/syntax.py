"""Rules and programs.

Two rule syntaxes coexist.  Revision-atom rules annotate in(a)/out(a) with
single lattice elements; pair-annotation rules annotate atoms directly with
evidence pairs.  Structural transformations connect the two and embed
unannotated revision rules over the two-valued lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain as _chain

from .lattice import (
    Elem,
    LatticeMismatchError,
    PairValue,
    TwoLattice,
    UnsupportedOperationError,
)

IN = "in"
OUT = "out"

OLD = "old"
NEW = "new"


@dataclass(frozen=True)
class RevisionAtom:
    """in(a) or out(a): an assertion about membership of atom a."""

    polarity: str
    atom: str

    def __post_init__(self):
        if self.polarity not in (IN, OUT):
            raise ValueError(f"polarity must be {IN!r} or {OUT!r}, got {self.polarity!r}")

    def dual(self) -> RevisionAtom:
        return RevisionAtom(OUT if self.polarity == IN else IN, self.atom)

    def __str__(self):
        return f"{self.polarity}({self.atom})"


def rin(atom: str) -> RevisionAtom:
    return RevisionAtom(IN, atom)


def rout(atom: str) -> RevisionAtom:
    return RevisionAtom(OUT, atom)


@dataclass(frozen=True)
class AnnotatedRevisionAtom:
    """A revision atom together with an evidence strength."""

    ratom: RevisionAtom
    ann: Elem

    def __str__(self):
        return f"{self.ratom}:{self.ann!r}"


@dataclass(frozen=True)
class PairAnnotatedAtom:
    """An atom annotated with an evidence pair."""

    atom: str
    ann: PairValue

    def __str__(self):
        return f"{self.atom}:<{self.ann.pos!r},{self.ann.neg!r}>"


@dataclass(frozen=True)
class OldRule:
    head: AnnotatedRevisionAtom
    body: tuple[AnnotatedRevisionAtom, ...]

    def __str__(self):
        if not self.body:
            return f"{self.head} <- ."
        return f"{self.head} <- {', '.join(str(b) for b in self.body)}."


@dataclass(frozen=True)
class NewRule:
    head: PairAnnotatedAtom
    body: tuple[PairAnnotatedAtom, ...]

    def __str__(self):
        if not self.body:
            return f"{self.head} <- ."
        return f"{self.head} <- {', '.join(str(b) for b in self.body)}."


@dataclass(frozen=True)
class ClassicRule:
    """Unannotated revision rule, used by the two-valued embedding."""

    head: RevisionAtom
    body: tuple[RevisionAtom, ...]


class Program:
    """An ordered, structurally deduplicated set of rules over a declared
    universe and a single annotation lattice.

    Rule order never affects semantics, only output formatting.  Atoms
    mentioned by rules must belong to the universe so that valuations stay
    total mappings.
    """

    __slots__ = ("syntax", "lattice", "universe", "rules", "__weakref__")

    def __init__(self, syntax, lattice, universe, rules):
        if syntax not in (OLD, NEW):
            raise ValueError(f"syntax must be {OLD!r} or {NEW!r}, got {syntax!r}")
        universe = tuple(sorted(set(universe)))
        uset = set(universe)
        rules = tuple(rules)
        want = OldRule if syntax == OLD else NewRule
        for r in rules:
            if not isinstance(r, want):
                raise TypeError(f"{syntax} program cannot hold a {type(r).__name__}")
            for a in (r.head,) + r.body:
                atom = a.ratom.atom if syntax == OLD else a.atom
                if atom not in uset:
                    raise ValueError(f"atom {atom!r} not in the declared universe")
                alat = a.ann.lattice if syntax == OLD else a.ann.pos.lattice
                if alat is not lattice:
                    raise LatticeMismatchError(
                        f"annotation on {atom!r} comes from a different lattice")
        self.syntax = syntax
        self.lattice = lattice
        self.universe = universe
        self.rules = tuple(dict.fromkeys(rules))

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return (self.syntax == other.syntax and self.lattice is other.lattice
                and self.universe == other.universe and self.rules == other.rules)

    def __hash__(self):
        return hash((self.syntax, id(self.lattice), self.universe, self.rules))

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __add__(self, other):
        """Union of two rule sets over the same universe and lattice."""
        if not isinstance(other, Program):
            return NotImplemented
        if other.lattice is not self.lattice:
            raise LatticeMismatchError("programs over different lattices")
        if other.syntax != self.syntax or other.universe != self.universe:
            raise ValueError("programs must share syntax and universe")
        return Program(self.syntax, self.lattice, self.universe, self.rules + other.rules)

    def __repr__(self):
        return f"Program({self.syntax}, {len(self.rules)} rules over {self.universe})"


def join_transform(p: Program) -> Program:
    """Merge repeated body occurrences of the same revision atom into a
    single occurrence annotated with the join of the merged annotations."""
    if p.syntax != OLD:
        raise UnsupportedOperationError("join transformation applies to revision-atom rules")
    out = []
    for r in p.rules:
        merged = {}
        for a in r.body:
            if a.ratom in merged:
                merged[a.ratom] = merged[a.ratom] | a.ann
            else:
                merged[a.ratom] = a.ann
        body = tuple(AnnotatedRevisionAtom(l, ann) for l, ann in merged.items())
        out.append(OldRule(r.head, body))
    return Program(OLD, p.lattice, p.universe, out)


def tr1(p: Program) -> Program:
    """Translate revision-atom rules to pair-annotation rules, padding the
    unused side of every annotation with bottom."""
    if p.syntax != OLD:
        raise UnsupportedOperationError("tr1 expects a revision-atom program")
    bot = p.lattice.bot

    def conv(a: AnnotatedRevisionAtom) -> PairAnnotatedAtom:
        if a.ratom.polarity == IN:
            pv = PairValue(a.ann, bot)
        else:
            pv = PairValue(bot, a.ann)
        return PairAnnotatedAtom(a.ratom.atom, pv)

    rules = [NewRule(conv(r.head), tuple(conv(b) for b in r.body)) for r in p.rules]
    return Program(NEW, p.lattice, p.universe, rules)


def tr2(p: Program) -> Program:
    """Translate each pair-annotation rule into an in-rule and an out-rule
    with identical bodies.

    The out-headed companion is emitted even when its annotation is bottom;
    such a rule is semantically inert and keeping it makes the translation
    uniform.
    """
    if p.syntax != NEW:
        raise UnsupportedOperationError("tr2 expects a pair-annotation program")

    def conv_body(atoms):
        return tuple(_chain.from_iterable(
            (AnnotatedRevisionAtom(rin(a.atom), a.ann.pos),
             AnnotatedRevisionAtom(rout(a.atom), a.ann.neg))
            for a in atoms))

    rules = []
    for r in p.rules:
        body = conv_body(r.body)
        rules.append(OldRule(AnnotatedRevisionAtom(rin(r.head.atom), r.head.ann.pos), body))
        rules.append(OldRule(AnnotatedRevisionAtom(rout(r.head.atom), r.head.ann.neg), body))
    return Program(OLD, p.lattice, p.universe, rules)


def encode_classic(rules, db, universe):
    """Embed unannotated revision rules over the two-valued lattice and
    encode the database as a valuation: members become <t, f>, the rest
    <f, t>.  Returns the encoded program and valuation, which share one
    lattice handle."""
    from .valuation import PairValuation

    lat = TwoLattice()
    t, f = lat.true, lat.false
    universe = tuple(sorted(set(universe)))
    uset = set(universe)
    db = frozenset(db)
    if not db <= uset:
        raise ValueError(f"database atoms {sorted(db - uset)} not in the universe")
    out = []
    for r in rules:
        if not isinstance(r, ClassicRule):
            raise TypeError(f"expected ClassicRule, got {type(r).__name__}")
        head = AnnotatedRevisionAtom(r.head, t)
        body = tuple(AnnotatedRevisionAtom(b, t) for b in r.body)
        out.append(OldRule(head, body))
    prog = Program(OLD, lat, universe, out)
    val = PairValuation(lat, {
        a: PairValue(t, f) if a in db else PairValue(f, t) for a in universe})
    return prog, val


def decode_classic(valuation):
    """Inverse of the database encoding: the member set when every value is
    <t, f> or <f, t>, otherwise None."""
    lat = valuation.lattice
    if not isinstance(lat, TwoLattice):
        raise UnsupportedOperationError("decoding is defined over the two-valued lattice")
    t, f = lat.true, lat.false
    tf = PairValue(t, f)
    ft = PairValue(f, t)
    out = set()
    for a, pv in valuation.items():
        if pv == tf:
            out.add(a)
        elif pv != ft:
            return None
    return frozenset(out)
