"""Valuations.

A pair valuation maps every universe atom to an evidence pair; a plain
valuation maps every revision atom to a single strength.  The two views are
interchangeable through theta.  This module also houses satisfaction, the
application of a change valuation, and the least-change difference.
"""

from __future__ import annotations

from .lattice import (
    LatticeError,
    LatticeMismatchError,
    PairValue,
    UnsupportedOperationError,
    bot_pair,
    pair_space,
    top_pair,
)
from .syntax import (
    IN,
    AnnotatedRevisionAtom,
    NewRule,
    OldRule,
    PairAnnotatedAtom,
    Program,
    RevisionAtom,
    rin,
    rout,
)


class PairValuation:
    """Immutable total mapping from universe atoms to evidence pairs."""

    __slots__ = ("lattice", "_vals", "_atoms")

    def __init__(self, lattice, vals):
        vals = dict(vals)
        for a, pv in vals.items():
            if not isinstance(pv, PairValue):
                raise TypeError(f"value for {a!r} is not a pair value")
            if pv.lattice is not lattice:
                raise LatticeMismatchError(f"value for {a!r} comes from a different lattice")
        self.lattice = lattice
        self._vals = vals
        self._atoms = tuple(sorted(vals))

    @classmethod
    def build(cls, lattice, universe, entries=None):
        """Total valuation over the universe; atoms without an entry get the
        bottom pair (no evidence either way)."""
        base = {a: bot_pair(lattice) for a in universe}
        if entries:
            for a, pv in dict(entries).items():
                if a not in base:
                    raise ValueError(f"atom {a!r} not in the universe")
                base[a] = pv
        return cls(lattice, base)

    @classmethod
    def bottom(cls, lattice, universe):
        return cls.build(lattice, universe)

    @classmethod
    def top(cls, lattice, universe):
        t = top_pair(lattice)
        return cls(lattice, {a: t for a in universe})

    @property
    def atoms(self):
        return self._atoms

    def __getitem__(self, atom) -> PairValue:
        return self._vals[atom]

    def items(self):
        return tuple((a, self._vals[a]) for a in self._atoms)

    def __eq__(self, other):
        if not isinstance(other, PairValuation):
            return NotImplemented
        return self._atoms == other._atoms and self._vals == other._vals

    def __hash__(self):
        return hash(tuple((a, self._vals[a]) for a in self._atoms))

    def _zip(self, other):
        if other.lattice is not self.lattice:
            raise LatticeMismatchError("valuations over different lattices")
        if other._atoms != self._atoms:
            raise ValueError("valuations over different universes")
        return ((a, self._vals[a], other._vals[a]) for a in self._atoms)

    def __and__(self, other):
        return PairValuation(self.lattice, {a: x & y for a, x, y in self._zip(other)})

    def __or__(self, other):
        return PairValuation(self.lattice, {a: x | y for a, x, y in self._zip(other)})

    def __neg__(self):
        return PairValuation(self.lattice, {a: -pv for a, pv in self._vals.items()})

    def leq_k(self, other) -> bool:
        return all(x <= y for _, x, y in self._zip(other))

    def __le__(self, other):
        return self.leq_k(other)

    def __ge__(self, other):
        return other.leq_k(self)

    def is_consistent(self) -> bool:
        return all(pv.is_consistent() for pv in self._vals.values())

    def replace(self, atom, pv) -> PairValuation:
        if atom not in self._vals:
            raise ValueError(f"atom {atom!r} not in the universe")
        vals = dict(self._vals)
        vals[atom] = pv
        return PairValuation(self.lattice, vals)

    def canonical_text(self) -> str:
        """The serialized valuation block body; doubles as the canonical
        sort key for enumeration output."""
        return "\n".join(f"{a} = {self._vals[a]!r}." for a in self._atoms)

    def __repr__(self):
        inner = "; ".join(f"{a}={self._vals[a]!r}" for a in self._atoms)
        return f"valuation({inner})"


class TValuation:
    """Immutable total mapping from revision atoms to lattice elements."""

    __slots__ = ("lattice", "_vals", "_universe")

    def __init__(self, lattice, vals):
        vals = dict(vals)
        for l, e in vals.items():
            if not isinstance(l, RevisionAtom):
                raise TypeError(f"key {l!r} is not a revision atom")
            if e.lattice is not lattice:
                raise LatticeMismatchError(f"value for {l} comes from a different lattice")
        universe = sorted({l.atom for l in vals})
        for a in universe:
            if rin(a) not in vals or rout(a) not in vals:
                raise ValueError(f"valuation not total: missing a value for atom {a!r}")
        self.lattice = lattice
        self._vals = vals
        self._universe = tuple(universe)

    @classmethod
    def build(cls, lattice, universe, entries=None):
        base = {}
        for a in universe:
            base[rin(a)] = lattice.bot
            base[rout(a)] = lattice.bot
        if entries:
            for l, e in dict(entries).items():
                if l not in base:
                    raise ValueError(f"revision atom {l} not over the universe")
                base[l] = e
        return cls(lattice, base)

    @property
    def universe(self):
        return self._universe

    def __getitem__(self, ratom) -> "Elem":
        return self._vals[ratom]

    def items(self):
        out = []
        for a in self._universe:
            out.append((rin(a), self._vals[rin(a)]))
            out.append((rout(a), self._vals[rout(a)]))
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, TValuation):
            return NotImplemented
        return self._universe == other._universe and self._vals == other._vals

    def __hash__(self):
        return hash(self.items())

    def __repr__(self):
        inner = "; ".join(f"{l}={e!r}" for l, e in self.items())
        return f"tvaluation({inner})"


def theta(v: TValuation) -> PairValuation:
    """Fold the two revision-atom strengths of each atom into one pair."""
    return PairValuation(v.lattice, {
        a: PairValue(v[rin(a)], v[rout(a)]) for a in v.universe})


def theta_inv(B: PairValuation) -> TValuation:
    """Split each evidence pair back into its two revision-atom strengths."""
    vals = {}
    for a, pv in B.items():
        vals[rin(a)] = pv.pos
        vals[rout(a)] = pv.neg
    return TValuation(B.lattice, vals)


def satisfies(B: PairValuation, x) -> bool:
    """Satisfaction of an annotated atom, a body, a rule, or a program.

    A rule is satisfied when its head is satisfied whenever its body is; a
    valuation satisfying every rule of a program is a model of it.
    """
    if isinstance(x, AnnotatedRevisionAtom):
        pv = B[x.ratom.atom]
        held = pv.pos if x.ratom.polarity == IN else pv.neg
        return x.ann <= held
    if isinstance(x, PairAnnotatedAtom):
        return x.ann <= B[x.atom]
    if isinstance(x, (OldRule, NewRule)):
        return not satisfies(B, x.body) or satisfies(B, x.head)
    if isinstance(x, Program):
        return all(satisfies(B, r) for r in x.rules)
    if isinstance(x, (tuple, list, set, frozenset)):
        return all(satisfies(B, a) for a in x)
    raise TypeError(f"cannot check satisfaction of {type(x).__name__}")


def apply_change(B: PairValuation, C: PairValuation) -> PairValuation:
    """Revise B by C: C's explicit evidence is enforced and its conflation
    caps what inertia carries over from B."""
    return (B & -C) | C


def is_consistent_valuation(B: PairValuation) -> bool:
    return B.is_consistent()


def _chain_pair_candidates(lat, pairs):
    """Finite sublattice of the chain generated by the given pair components
    under meet, join, and complement: the components, their complements, and
    the chain bounds.  The least change valuation lives there."""
    keys = {lat.bot.key, lat.top.key}
    for pv in pairs:
        keys.add(pv.pos.key)
        keys.add(pv.neg.key)
    keys |= {1 - k for k in keys}
    els = [lat.element(k) for k in sorted(keys)]
    return tuple(PairValue(p, n) for p in els for n in els)


def _atom_solutions(r, b, candidates):
    return [c for c in candidates if ((b & -c) | c) == r]


def _candidates_for(lat, r, b):
    if lat.is_finite:
        return pair_space(lat)
    return _chain_pair_candidates(lat, (r, b))


def transformable(B: PairValuation, R: PairValuation) -> bool:
    """Whether some change valuation turns B into R."""
    if R.lattice is not B.lattice:
        raise LatticeMismatchError("valuations over different lattices")
    lat = B.lattice
    space = pair_space(lat) if lat.is_finite else None
    for a in B.atoms:
        cands = space if space is not None else _candidates_for(lat, R[a], B[a])
        if not any(((B[a] & -c) | c) == R[a] for c in cands):
            return False
    return True


def diff(R: PairValuation, B: PairValuation) -> PairValuation:
    """Least change valuation transforming B into R, or the all-top
    valuation when no change valuation does.

    The search is pointwise: per atom, the meet of all solutions is itself a
    solution on a validated distributive lattice.  On the rational chain the
    search is restricted to the finite sublattice generated by the values
    that occur; the least solution provably lies there.
    """
    if R.lattice is not B.lattice:
        raise LatticeMismatchError("valuations over different lattices")
    if R.atoms != B.atoms:
        raise ValueError("valuations over different universes")
    lat = B.lattice
    space = pair_space(lat) if lat.is_finite else None
    out = {}
    for a in B.atoms:
        cands = space if space is not None else _candidates_for(lat, R[a], B[a])
        sols = _atom_solutions(R[a], B[a], cands)
        if not sols:
            return PairValuation.top(lat, B.atoms)
        m = PairValue(lat.big_meet(s.pos for s in sols), lat.big_meet(s.neg for s in sols))
        if ((B[a] & -m) | m) != R[a]:
            if lat.is_finite:
                raise LatticeError("least difference not attained; lattice may be non-distributive")
            raise UnsupportedOperationError(
                f"difference at atom {a!r} falls outside the supported chain fragment")
        out[a] = m
    return PairValuation(lat, out)
