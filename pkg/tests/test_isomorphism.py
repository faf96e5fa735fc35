"""Pair-lattice isomorphisms, conflation preservation, and shifting."""

import random

import pytest

from annrev import (
    MPT,
    LatticeError,
    NewRule,
    PairAnnotatedAtom,
    PairIso,
    PairMap,
    PairValuation,
    PairValue,
    Program,
    TwoLattice,
    UnsupportedOperationError,
    apply_iso,
    build_shift_iso,
    enumerate_revisions,
    encode_classic,
    is_justified_revision,
    pair_space,
    preserves_conflation,
    tr1,
)
from helpers import (
    old_program,
    powerset_pq,
    powerset_pqr_custom,
    random_conflation_iso,
    random_new_program,
    random_valuation,
    valuation,
)


def qr_permutation(lat):
    """The q <-> r label permutation lifted to subsets."""
    sigma = {"p": "p", "q": "r", "r": "q"}
    return {e: lat.element(frozenset(sigma[l] for l in e.key)) for e in lat.elements()}


def test_swap_preserves_conflation():
    lat = powerset_pq()
    iso = PairIso(lat, {}, PairMap.swap(lat))
    assert preserves_conflation(iso)


def test_identity_preserves_conflation():
    lat = powerset_pq()
    assert PairMap.identity(lat).preserves_conflation()


def test_custom_complement_permutation_breaks_conflation():
    lat = powerset_pqr_custom()
    m = PairMap.from_permutation(lat, qr_permutation(lat))
    assert not m.preserves_conflation()
    # the specific witness: psi(-<{p},{}>) != -psi(<{p},{}>)
    v = PairValue(lat.element({"p"}), lat.bot)
    assert m(-v) == PairValue(lat.element({"p", "q", "r"}), lat.element({"p", "q"}))
    assert -m(v) == PairValue(lat.element({"p", "q", "r"}), lat.element({"p", "r"}))


def test_apply_iso_counterexample_valuations():
    lat = powerset_pqr_custom()
    iso = PairIso(lat, {"a": PairMap.from_permutation(lat, qr_permutation(lat))})
    B_I = valuation(lat, {"a": (frozenset(), {"r"})})
    B_R = valuation(lat, {"a": ({"p"}, {"r"})})
    assert apply_iso(iso, B_I) == valuation(lat, {"a": (frozenset(), {"q"})})
    assert apply_iso(iso, B_R) == valuation(lat, {"a": ({"p"}, {"q"})})


def test_apply_identity_is_noop_and_swap_involutive():
    rng = random.Random(3)
    lat = powerset_pq()
    ident = PairIso(lat, {}, PairMap.identity(lat))
    swap = PairIso(lat, {}, PairMap.swap(lat))
    for _ in range(30):
        B = random_valuation(rng, lat, ("a", "b"))
        assert apply_iso(ident, B) == B
        assert apply_iso(swap, apply_iso(swap, B)) == B
        p = random_new_program(rng, lat, ("a", "b"), 4)
        assert apply_iso(ident, p) == p
        assert apply_iso(swap, apply_iso(swap, p)) == p


def test_apply_iso_rejects_old_syntax():
    lat = powerset_pq()
    iso = PairIso(lat, {}, PairMap.identity(lat))
    p = old_program(lat, ("a",), [(("in", "a", {"p"}), [])])
    with pytest.raises(UnsupportedOperationError):
        apply_iso(iso, p)
    assert apply_iso(iso, tr1(p)) == tr1(p)


def test_pairmap_validation_rejects_non_order_map():
    lat = powerset_pq()
    space = list(pair_space(lat))
    shuffled = space[:]
    random.Random(5).shuffle(shuffled)
    table = dict(zip(space, shuffled))
    with pytest.raises(LatticeError):
        PairMap.from_table(lat, table)


def test_pairmap_rejects_permutation_on_infinite_lattice():
    from annrev import UnitChain
    unit = UnitChain()
    PairMap.identity(unit)
    PairMap.swap(unit)
    with pytest.raises(UnsupportedOperationError):
        PairMap.from_permutation(unit, {})


def test_shifting_fails_without_conflation_preservation():
    # With a conflation-preserving map the revision shifts; the q<->r
    # permutation over the custom complement does not preserve conflation
    # and the shifted candidate stops being a revision.
    lat = powerset_pqr_custom()
    head = PairAnnotatedAtom("a", PairValue(lat.element({"p"}), lat.bot))
    p = Program("new", lat, ("a",), [NewRule(head, ())])
    B_I = valuation(lat, {"a": (frozenset(), {"r"})})
    B_R = valuation(lat, {"a": ({"p"}, {"r"})})
    assert is_justified_revision(p, B_I, B_R, MPT).verified

    iso = PairIso(lat, {"a": PairMap.from_permutation(lat, qr_permutation(lat))})
    assert not preserves_conflation(iso)
    sB_I, sB_R = apply_iso(iso, B_I), apply_iso(iso, B_R)
    sP = apply_iso(iso, p)
    assert sP == p  # the program is fixed by the permutation
    out = is_justified_revision(sP, sB_I, sB_R, MPT)
    assert not out.verified
    from annrev import apply_change
    assert apply_change(sB_I, out.necessary_change) == valuation(
        lat, {"a": ({"p"}, frozenset())})


def test_shifting_commutes_for_conflation_preserving_isos():
    rng = random.Random(7)
    lat = powerset_pq()
    atoms = ("a", "b")
    for _ in range(40):
        p = random_new_program(rng, lat, atoms, 4)
        B_I = random_valuation(rng, lat, atoms)
        iso = random_conflation_iso(rng, lat, atoms)
        assert preserves_conflation(iso)
        before = {apply_iso(iso, o.candidate) for o in enumerate_revisions(p, B_I, MPT)}
        after = {o.candidate for o in
                 enumerate_revisions(apply_iso(iso, p), apply_iso(iso, B_I), MPT)}
        assert before == after


def test_build_shift_iso_examples():
    lat = TwoLattice()
    universe = ("a", "b")
    iso = build_shift_iso(lat, universe, {"a"}, set())
    t, f = lat.true, lat.false
    swapped = iso.map_for("a")(PairValue(t, f))
    assert swapped == PairValue(f, t)
    assert iso.map_for("b")(PairValue(t, f)) == PairValue(t, f)

    same = build_shift_iso(lat, universe, {"a"}, {"a"})
    for atom in universe:
        for v in pair_space(lat):
            assert same.map_for(atom)(v) == v


def test_build_shift_iso_maps_first_db_to_second():
    rng = random.Random(11)
    universe = ("a", "b", "c")
    for _ in range(50):
        b1 = frozenset(a for a in universe if rng.random() < 0.5)
        b2 = frozenset(a for a in universe if rng.random() < 0.5)
        _, v1 = encode_classic([], b1, universe)
        lat = v1.lattice
        iso = build_shift_iso(lat, universe, b1, b2)
        assert preserves_conflation(iso)
        shifted = apply_iso(iso, v1)
        target = {a: (lat.true, lat.false) if a in b2 else (lat.false, lat.true)
                  for a in universe}
        assert shifted == PairValuation(lat, {
            a: PairValue(x, y) for a, (x, y) in target.items()})


def test_map_for_requires_entry_or_default():
    lat = powerset_pq()
    iso = PairIso(lat, {"a": PairMap.identity(lat)})
    with pytest.raises(ValueError):
        iso.map_for("b")
