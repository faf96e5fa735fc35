"""Shared builders for the test suite: the lattices the fixtures live on,
random program/valuation generators, and enumeration shortcuts."""

import random

from annrev import (
    NEW,
    OLD,
    AnnotatedRevisionAtom,
    LevelChain,
    NewRule,
    OldRule,
    PairAnnotatedAtom,
    PairIso,
    PairMap,
    PairValuation,
    PairValue,
    PowersetLattice,
    Program,
    RevisionAtom,
    enumerate_revisions,
    pair_space,
)

PQR_COMPLEMENT = {
    frozenset(): frozenset("pqr"),
    frozenset("p"): frozenset("pr"),
    frozenset("q"): frozenset("qr"),
    frozenset("r"): frozenset("pq"),
    frozenset("pq"): frozenset("r"),
    frozenset("pr"): frozenset("p"),
    frozenset("qr"): frozenset("q"),
    frozenset("pqr"): frozenset(),
}


def powerset_p():
    return PowersetLattice(("p",))


def powerset_pq():
    return PowersetLattice(("p", "q"))


def powerset_pqr_custom():
    """Powerset of {p,q,r} with the non-standard De Morgan complement used by
    the shifting counterexample."""
    return PowersetLattice(("p", "q", "r"), PQR_COMPLEMENT)


def chain4():
    return LevelChain(("c0", "c1", "c2", "c3"))


def oatom(lat, pol, atom, ann):
    if not hasattr(ann, "lattice"):
        ann = lat.element(ann)
    return AnnotatedRevisionAtom(RevisionAtom(pol, atom), ann)


def old_program(lat, universe, rules):
    """Rules given as (head_triple, [body_triples]) with triples
    (polarity, atom, annotation)."""
    built = []
    for head, body in rules:
        built.append(OldRule(
            oatom(lat, *head), tuple(oatom(lat, *b) for b in body)))
    return Program(OLD, lat, universe, built)


def valuation(lat, entries):
    """Valuation from {atom: (pos, neg)} with raw annotation payloads."""
    vals = {}
    for a, (x, y) in entries.items():
        if not hasattr(x, "lattice"):
            x = lat.element(x)
        if not hasattr(y, "lattice"):
            y = lat.element(y)
        vals[a] = PairValue(x, y)
    return PairValuation(lat, vals)


def random_old_program(rng, lat, atoms, max_rules, max_body=2):
    els = lat.elements()
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = oatom(lat, rng.choice(("in", "out")), rng.choice(atoms), rng.choice(els))
        body = tuple(
            oatom(lat, rng.choice(("in", "out")), rng.choice(atoms), rng.choice(els))
            for _ in range(rng.randint(0, max_body)))
        rules.append(OldRule(head, body))
    return Program(OLD, lat, atoms, rules)


def random_new_program(rng, lat, atoms, max_rules, max_body=2):
    space = pair_space(lat)
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = PairAnnotatedAtom(rng.choice(atoms), rng.choice(space))
        body = tuple(
            PairAnnotatedAtom(rng.choice(atoms), rng.choice(space))
            for _ in range(rng.randint(0, max_body)))
        rules.append(NewRule(head, body))
    return Program(NEW, lat, atoms, rules)


def random_valuation(rng, lat, atoms):
    space = pair_space(lat)
    return PairValuation(lat, {a: rng.choice(space) for a in atoms})


def random_universe(rng, weights=((1, 9), (2, 9), (3, 2))):
    """Small universes, biased toward 1 or 2 atoms to keep enumeration
    affordable while still exercising 3-atom cases."""
    sizes = [s for s, w in weights for _ in range(w)]
    n = rng.choice(sizes)
    return tuple("abc"[:n])


def revision_set(p, B_I, semantics="mpt"):
    return frozenset(o.candidate for o in enumerate_revisions(p, B_I, semantics))


def all_valuations(lat, atoms):
    """Every pair valuation over the universe; keep the universe tiny."""
    from itertools import product
    space = pair_space(lat)
    for combo in product(space, repeat=len(atoms)):
        yield PairValuation(lat, dict(zip(atoms, combo)))


def random_label_perm(rng, lat):
    labels = list(lat.labels)
    shuffled = labels[:]
    rng.shuffle(shuffled)
    sigma = dict(zip(labels, shuffled))
    return {
        e: lat.element(frozenset(sigma[l] for l in e.key))
        for e in lat.elements()}


def random_conflation_iso(rng, lat, atoms):
    """Per-atom isomorphisms built from label permutations and component
    swaps; both preserve conflation when the complement is set-theoretic."""
    maps = {}
    for a in atoms:
        perm = random_label_perm(rng, lat) if rng.random() < 0.7 else None
        swap = rng.random() < 0.5
        maps[a] = PairMap.from_permutation(lat, perm, swap=swap) if perm is not None \
            else (PairMap.swap(lat) if swap else PairMap.identity(lat))
    return PairIso(lat, maps)


def grow_to_model(p, B):
    """Close a valuation upward under the program's one-step operator; the
    result is always a model and reachable in few steps."""
    from annrev import tpb
    cur = B
    for _ in range(len(p.rules) + 2):
        nxt = cur | tpb(p, cur)
        if nxt == cur:
            return cur
        cur = nxt
    return cur
