"""Annotation lattices.

Evidence strengths live in a bounded distributive lattice carrying a De
Morgan complement (an order-reversing involution satisfying both De Morgan
laws).  Pairs of strengths, one for membership and one against it, form the
product lattice under the componentwise information ordering; that product
carries conflation and the consistency test used by the revision engine.

Supported lattice kinds: the two-valued Boolean lattice, powersets of a
finite label set (with an optional explicit complement table), finite named
chains, the chain of exact rationals in [0, 1], and custom finite lattices
given by an explicit order relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class LatticeError(Exception):
    """Structural problem with a lattice or one of its elements."""


class LatticeMismatchError(LatticeError):
    """Elements of two different lattice handles were combined."""


class UnsupportedOperationError(LatticeError):
    """The operation is not defined for this lattice kind."""


class Elem:
    """Element of one specific lattice handle.

    Operators delegate to the handle; mixing handles raises
    LatticeMismatchError instead of coercing.
    """

    __slots__ = ("lattice", "key")

    def __init__(self, lattice, key):
        self.lattice = lattice
        self.key = key

    def _check(self, other):
        if not isinstance(other, Elem):
            raise TypeError(f"expected a lattice element, got {type(other).__name__}")
        if other.lattice is not self.lattice:
            raise LatticeMismatchError("elements belong to different lattice handles")

    def __eq__(self, other):
        if not isinstance(other, Elem):
            return NotImplemented
        self._check(other)
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __le__(self, other):
        self._check(other)
        return self.lattice.leq(self, other)

    def __ge__(self, other):
        self._check(other)
        return self.lattice.leq(other, self)

    def __lt__(self, other):
        return self.__le__(other) and self.key != other.key

    def __gt__(self, other):
        return self.__ge__(other) and self.key != other.key

    def __and__(self, other):
        self._check(other)
        return self.lattice.meet(self, other)

    def __or__(self, other):
        self._check(other)
        return self.lattice.join(self, other)

    def __invert__(self):
        return self.lattice.complement(self)

    def __repr__(self):
        return self.lattice.format_element(self)


class Lattice:
    """Base class for lattice handles.

    Handles compare by identity and are immutable after construction, so they
    are safe to share between concurrent readers.
    """

    kind = "abstract"
    is_finite = True

    def leq(self, x: Elem, y: Elem) -> bool:
        raise NotImplementedError

    def meet(self, x: Elem, y: Elem) -> Elem:
        raise NotImplementedError

    def join(self, x: Elem, y: Elem) -> Elem:
        raise NotImplementedError

    def complement(self, x: Elem) -> Elem:
        raise NotImplementedError

    @property
    def bot(self) -> Elem:
        raise NotImplementedError

    @property
    def top(self) -> Elem:
        raise NotImplementedError

    def elements(self) -> tuple[Elem, ...]:
        """All elements in canonical order (finite lattices only)."""
        raise UnsupportedOperationError(f"{self.kind} lattice is not finite")

    def big_join(self, xs) -> Elem:
        """Join of a finite collection; the empty join is bottom."""
        out = self.bot
        for x in xs:
            out = out | x
        return out

    def big_meet(self, xs) -> Elem:
        """Meet of a finite collection; the empty meet is top."""
        out = self.top
        for x in xs:
            out = out & x
        return out

    def pcomp(self, alpha: Elem, beta: Elem) -> Elem:
        """Least gamma with join(alpha, gamma) >= beta.

        On a validated distributive lattice the meet of all satisfying
        elements is itself satisfying, so a full scan is exact.  Chains
        override this with a closed form.
        """
        sats = [g for g in self.elements() if beta <= (alpha | g)]
        out = self.big_meet(sats)
        if not beta <= (alpha | out):
            raise LatticeError("pcomp has no least solution; lattice is not distributive")
        return out

    def is_boolean(self) -> bool:
        """True when the complement is a Boolean complement."""
        cached = getattr(self, "_boolean", None)
        if cached is None:
            if not self.is_finite:
                cached = False
            else:
                bot, top = self.bot, self.top
                cached = all((x & ~x) == bot and (x | ~x) == top for x in self.elements())
            self._boolean = cached
        return cached

    def format_element(self, x: Elem) -> str:
        raise NotImplementedError

    def sort_key(self, x: Elem):
        """Total order on elements used for canonical output."""
        raise NotImplementedError

    def spec_key(self):
        """Structural identity of the handle, for document comparison."""
        raise NotImplementedError


class LevelChain(Lattice):
    """Finite totally ordered lattice of named levels, least level first.

    The complement reverses the chain, which is the unique De Morgan
    involution on a finite chain.
    """

    kind = "chain"

    def __init__(self, names):
        names = tuple(names)
        if not names:
            raise LatticeError("a chain needs at least one level")
        if len(set(names)) != len(names):
            raise LatticeError("duplicate level names")
        self.names = names
        self._elems = tuple(Elem(self, i) for i in range(len(names)))
        self._index = {n: i for i, n in enumerate(names)}

    def element(self, name: str) -> Elem:
        try:
            return self._elems[self._index[name]]
        except KeyError:
            raise LatticeError(f"unknown chain level {name!r}") from None

    def elements(self):
        return self._elems

    def leq(self, x, y):
        return x.key <= y.key

    def meet(self, x, y):
        return x if x.key <= y.key else y

    def join(self, x, y):
        return x if x.key >= y.key else y

    def complement(self, x):
        return self._elems[len(self._elems) - 1 - x.key]

    @property
    def bot(self):
        return self._elems[0]

    @property
    def top(self):
        return self._elems[-1]

    def pcomp(self, alpha, beta):
        return self.bot if beta.key <= alpha.key else beta

    def format_element(self, x):
        return self.names[x.key]

    def sort_key(self, x):
        return x.key

    def spec_key(self):
        return ("chain", self.names)


class TwoLattice(LevelChain):
    """The two-valued Boolean lattice f < t."""

    kind = "two"

    def __init__(self):
        super().__init__(("f", "t"))

    @property
    def false(self):
        return self.bot

    @property
    def true(self):
        return self.top

    def spec_key(self):
        return ("two",)


class UnitChain(Lattice):
    """The chain of exact rationals in [0, 1] with complement 1 - x.

    Values are exact fractions; decimal text is converted on input and never
    reappears in output.  The chain is infinite, so exhaustive operations
    are refused.  It is totally ordered, hence distributive over arbitrary
    joins and meets; that is a property of linear orders and is not checked
    mechanically.
    """

    kind = "unit"
    is_finite = False

    def __init__(self):
        self._bot = Elem(self, Fraction(0))
        self._top = Elem(self, Fraction(1))

    def element(self, value) -> Elem:
        f = Fraction(value)
        if f == 0:
            return self._bot
        if f == 1:
            return self._top
        if not 0 < f < 1:
            raise LatticeError(f"chain value {f} outside [0, 1]")
        return Elem(self, f)

    def leq(self, x, y):
        return x.key <= y.key

    def meet(self, x, y):
        return x if x.key <= y.key else y

    def join(self, x, y):
        return x if x.key >= y.key else y

    def complement(self, x):
        return self.element(1 - x.key)

    @property
    def bot(self):
        return self._bot

    @property
    def top(self):
        return self._top

    def pcomp(self, alpha, beta):
        return self._bot if beta.key <= alpha.key else beta

    def is_boolean(self):
        return False

    def format_element(self, x):
        f = x.key
        if f.denominator == 1:
            return str(f.numerator)
        return f"{f.numerator}/{f.denominator}"

    def sort_key(self, x):
        return x.key

    def spec_key(self):
        return ("chain", "unit")


class PowersetLattice(Lattice):
    """All subsets of a finite label set, ordered by inclusion.

    The complement defaults to set difference from the full label set; an
    explicit table may override it, and validate() re-checks any table
    against the De Morgan axioms.
    """

    kind = "powerset"
    MAX_LABELS = 12

    def __init__(self, labels, complement_table=None):
        labels = tuple(labels)
        if not labels:
            raise LatticeError("powerset lattice needs at least one label")
        if len(set(labels)) != len(labels):
            raise LatticeError("duplicate labels")
        if len(labels) > self.MAX_LABELS:
            raise LatticeError(f"powerset lattice limited to {self.MAX_LABELS} labels")
        self.labels = labels
        self._label_index = {l: i for i, l in enumerate(labels)}
        full = frozenset(labels)
        subsets = [frozenset()]
        for l in labels:
            subsets += [s | {l} for s in subsets]
        subsets.sort(key=self._key_order)
        self._elems = tuple(Elem(self, s) for s in subsets)
        self._by_key = {e.key: e for e in self._elems}
        self._full = full
        if complement_table is None:
            self._comp = {s: full - s for s in subsets}
            self.has_custom_complement = False
        else:
            table = {frozenset(k): frozenset(v) for k, v in complement_table.items()}
            for s in subsets:
                if s not in table:
                    raise LatticeError(f"complement table misses {self._fmt(s)}")
                if not table[s] <= full:
                    raise LatticeError(f"complement of {self._fmt(s)} uses unknown labels")
            if len(table) != len(subsets):
                raise LatticeError("complement table mentions unknown subsets")
            self._comp = table
            self.has_custom_complement = True

    def _key_order(self, s):
        return tuple(sorted(self._label_index[l] for l in s))

    def _fmt(self, s):
        return "{" + ",".join(l for l in self.labels if l in s) + "}"

    def element(self, members) -> Elem:
        s = frozenset(members)
        try:
            return self._by_key[s]
        except KeyError:
            bad = sorted(s - self._full)
            raise LatticeError(f"unknown labels {bad}") from None

    def elements(self):
        return self._elems

    def leq(self, x, y):
        return x.key <= y.key

    def meet(self, x, y):
        return self._by_key[x.key & y.key]

    def join(self, x, y):
        return self._by_key[x.key | y.key]

    def complement(self, x):
        return self._by_key[self._comp[x.key]]

    @property
    def bot(self):
        return self._elems[0]

    @property
    def top(self):
        return self._by_key[self._full]

    def format_element(self, x):
        return self._fmt(x.key)

    def sort_key(self, x):
        return self._key_order(x.key)

    def spec_key(self):
        if self.has_custom_complement:
            table = tuple(sorted((tuple(sorted(k)), tuple(sorted(v))) for k, v in self._comp.items()))
            return ("powerset", self.labels, table)
        return ("powerset", self.labels, None)


class CustomLattice(Lattice):
    """Finite lattice from an explicit order relation and complement table.

    Meets and joins are precomputed at construction so the engine pays O(1)
    per operation.  Construction only checks that the tables are total; the
    lattice axioms themselves are the business of validate().
    """

    kind = "custom"

    def __init__(self, names, order_pairs, complement_table):
        names = tuple(names)
        if not names:
            raise LatticeError("custom lattice needs at least one element")
        if len(set(names)) != len(names):
            raise LatticeError("duplicate element names")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}
        n = len(names)
        leq = [[i == j for j in range(n)] for i in range(n)]
        for a, b in order_pairs:
            if a not in self._index or b not in self._index:
                raise LatticeError(f"order pair ({a!r}, {b!r}) uses unknown elements")
            leq[self._index[a]][self._index[b]] = True
        for k in range(n):
            for i in range(n):
                if leq[i][k]:
                    row_k = leq[k]
                    row_i = leq[i]
                    for j in range(n):
                        if row_k[j]:
                            row_i[j] = True
        self._leq = leq
        self._elems = tuple(Elem(self, i) for i in range(n))
        self._meet = [[self._bound(i, j, lower=True) for j in range(n)] for i in range(n)]
        self._join = [[self._bound(i, j, lower=False) for j in range(n)] for i in range(n)]
        bots = [i for i in range(n) if all(leq[i][j] for j in range(n))]
        tops = [i for i in range(n) if all(leq[j][i] for j in range(n))]
        self._bot = self._elems[bots[0]] if len(bots) == 1 else None
        self._top = self._elems[tops[0]] if len(tops) == 1 else None
        comp = {}
        for a, b in complement_table.items():
            if a not in self._index or b not in self._index:
                raise LatticeError(f"complement entry ({a!r}, {b!r}) uses unknown elements")
            comp[self._index[a]] = self._index[b]
        if len(comp) != n:
            missing = [names[i] for i in range(n) if i not in comp]
            raise LatticeError(f"complement table misses {missing}")
        self._comp = comp

    def _bound(self, i, j, lower):
        leq = self._leq
        if lower:
            cands = [k for k in range(len(leq)) if leq[k][i] and leq[k][j]]
            best = [m for m in cands if all(leq[k][m] for k in cands)]
        else:
            cands = [k for k in range(len(leq)) if leq[i][k] and leq[j][k]]
            best = [m for m in cands if all(leq[m][k] for k in cands)]
        return best[0] if len(best) == 1 else None

    def element(self, name: str) -> Elem:
        try:
            return self._elems[self._index[name]]
        except KeyError:
            raise LatticeError(f"unknown element {name!r}") from None

    def elements(self):
        return self._elems

    def leq(self, x, y):
        return self._leq[x.key][y.key]

    def meet(self, x, y):
        m = self._meet[x.key][y.key]
        if m is None:
            raise LatticeError(
                f"no meet of {self.format_element(x)} and {self.format_element(y)}")
        return self._elems[m]

    def join(self, x, y):
        m = self._join[x.key][y.key]
        if m is None:
            raise LatticeError(
                f"no join of {self.format_element(x)} and {self.format_element(y)}")
        return self._elems[m]

    def complement(self, x):
        return self._elems[self._comp[x.key]]

    @property
    def bot(self):
        if self._bot is None:
            raise LatticeError("order has no least element")
        return self._bot

    @property
    def top(self):
        if self._top is None:
            raise LatticeError("order has no greatest element")
        return self._top

    def cover_pairs(self):
        """Transitive reduction of the order, for canonical serialization."""
        n = len(self._elems)
        leq = self._leq
        out = []
        for i in range(n):
            for j in range(n):
                if i == j or not leq[i][j]:
                    continue
                if any(k != i and k != j and leq[i][k] and leq[k][j] for k in range(n)):
                    continue
                out.append((self.names[i], self.names[j]))
        return tuple(out)

    def format_element(self, x):
        return self.names[x.key]

    def sort_key(self, x):
        return x.key

    def spec_key(self):
        comp = tuple(sorted((self.names[a], self.names[b]) for a, b in self._comp.items()))
        return ("custom", self.names, self.cover_pairs(), comp)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a lattice axiom scan; failures name the first offender."""

    ok: bool
    failures: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def _fail(msg):
    return ValidationReport(False, (msg,))


def validate(lat: Lattice) -> ValidationReport:
    """Check the lattice axioms by exhaustive scan.

    Finite lattices get the full treatment: partial order, existence of all
    binary meets and joins plus bottom and top, distributivity on every
    triple, and the complement being an order-reversing involution subject
    to both De Morgan laws.  Chains additionally must be total orders.  The
    infinite unit chain is spot-checked on a sample of rationals; its laws
    hold by the closed forms.
    """
    if not lat.is_finite:
        sample = [lat.element(Fraction(i, 7)) for i in range(8)]
        sample += [lat.element(Fraction(3, 10)), lat.element(Fraction(4, 5))]
        for x in sample:
            if ~~x != x:
                return _fail(f"complement not an involution at {x!r}")
        for x in sample:
            for y in sample:
                if not (x <= y or y <= x):
                    return _fail(f"chain not totally ordered at {x!r}, {y!r}")
                if x <= y and not ~y <= ~x:
                    return _fail(f"complement not order-reversing at {x!r}, {y!r}")
                if ~(x | y) != (~x & ~y) or ~(x & y) != (~x | ~y):
                    return _fail(f"De Morgan law fails at {x!r}, {y!r}")
        return ValidationReport(True)

    els = lat.elements()
    for x in els:
        if not lat.leq(x, x):
            return _fail(f"order not reflexive at {x!r}")
    for x in els:
        for y in els:
            if lat.leq(x, y) and lat.leq(y, x) and x.key != y.key:
                return _fail(f"order not antisymmetric at {x!r}, {y!r}")
            for z in els:
                if lat.leq(x, y) and lat.leq(y, z) and not lat.leq(x, z):
                    return _fail(f"order not transitive at {x!r}, {y!r}, {z!r}")

    for x in els:
        for y in els:
            try:
                m = x & y
                j = x | y
            except LatticeError as exc:
                return _fail(str(exc))
            if not (m <= x and m <= y):
                return _fail(f"meet of {x!r}, {y!r} is not a lower bound")
            if any(z <= x and z <= y and not z <= m for z in els):
                return _fail(f"meet of {x!r}, {y!r} is not greatest")
            if not (x <= j and y <= j):
                return _fail(f"join of {x!r}, {y!r} is not an upper bound")
            if any(x <= z and y <= z and not j <= z for z in els):
                return _fail(f"join of {x!r}, {y!r} is not least")
    try:
        bot, top = lat.bot, lat.top
    except LatticeError as exc:
        return _fail(str(exc))
    if any(not bot <= x or not x <= top for x in els):
        return _fail("bottom or top is not a bound")

    for x in els:
        for y in els:
            for z in els:
                if (x & (y | z)) != ((x & y) | (x & z)):
                    return _fail(
                        f"distributivity fails at {x!r}, {y!r}, {z!r}")

    for x in els:
        if ~~x != x:
            return _fail(f"complement not an involution at {x!r}")
    for x in els:
        for y in els:
            if x <= y and not ~y <= ~x:
                return _fail(f"complement not order-reversing at {x!r}, {y!r}")
            if ~(x | y) != (~x & ~y):
                return _fail(f"De Morgan law (join) fails at {x!r}, {y!r}")
            if ~(x & y) != (~x | ~y):
                return _fail(f"De Morgan law (meet) fails at {x!r}, {y!r}")

    if isinstance(lat, LevelChain):
        for x in els:
            for y in els:
                if not (x <= y or y <= x):
                    return _fail(f"chain not totally ordered at {x!r}, {y!r}")
    return ValidationReport(True)


class PairValue:
    """Pair of evidence strengths: support for membership and against it.

    Ordered componentwise by information content; `&` and `|` are meet and
    join in that ordering, unary `-` is conflation.
    """

    __slots__ = ("pos", "neg")

    def __init__(self, pos: Elem, neg: Elem):
        if not isinstance(pos, Elem) or not isinstance(neg, Elem):
            raise TypeError("pair components must be lattice elements")
        if neg.lattice is not pos.lattice:
            raise LatticeMismatchError("pair components from different lattice handles")
        self.pos = pos
        self.neg = neg

    @property
    def lattice(self):
        return self.pos.lattice

    def __eq__(self, other):
        if not isinstance(other, PairValue):
            return NotImplemented
        return self.pos == other.pos and self.neg == other.neg

    def __hash__(self):
        return hash((self.pos.key, self.neg.key))

    def __le__(self, other):
        return self.pos <= other.pos and self.neg <= other.neg

    def __ge__(self, other):
        return other.__le__(self)

    def __and__(self, other):
        return PairValue(self.pos & other.pos, self.neg & other.neg)

    def __or__(self, other):
        return PairValue(self.pos | other.pos, self.neg | other.neg)

    def __neg__(self):
        return PairValue(~self.neg, ~self.pos)

    def is_consistent(self) -> bool:
        return self <= -self

    def __repr__(self):
        return f"<{self.pos!r}, {self.neg!r}>"


def meet_k(x: PairValue, y: PairValue) -> PairValue:
    return x & y


def join_k(x: PairValue, y: PairValue) -> PairValue:
    return x | y


def leq_k(x: PairValue, y: PairValue) -> bool:
    return x <= y


def bot_pair(lat: Lattice) -> PairValue:
    return PairValue(lat.bot, lat.bot)


def top_pair(lat: Lattice) -> PairValue:
    return PairValue(lat.top, lat.top)


def conflation(v: PairValue) -> PairValue:
    return -v


def is_consistent(v: PairValue) -> bool:
    return v.is_consistent()


def negation(v: PairValue) -> PairValue:
    """Componentwise complement; defined only over Boolean lattices."""
    if not v.lattice.is_boolean():
        raise UnsupportedOperationError("negation requires a Boolean lattice")
    return PairValue(~v.pos, ~v.neg)


def pcomp_pair(x: PairValue, y: PairValue) -> PairValue:
    """Componentwise least solution of join(x, g) >= y in the pair lattice."""
    lat = x.lattice
    return PairValue(lat.pcomp(x.pos, y.pos), lat.pcomp(x.neg, y.neg))


def pair_space(lat: Lattice) -> tuple[PairValue, ...]:
    """Every pair value over a finite lattice, in canonical order."""
    els = sorted(lat.elements(), key=lat.sort_key)
    return tuple(PairValue(p, n) for p in els for n in els)


def pair_sort_key(v: PairValue):
    lat = v.lattice
    return (lat.sort_key(v.pos), lat.sort_key(v.neg))
