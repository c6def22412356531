import random

import pytest
from hypothesis import given, settings

from frametop.errors import ContractViolation
from frametop.frames import FrameMap, Sublattice, identity_map, quotient_space, sublattice_closure
from frametop.poset import antichain, chain, find_isomorphism, open_sets, point_space, random_poset, sierpinski
from frametop.synthesis import (
    crossed_product_ideals,
    meet_irreducibles,
    regularity_check,
    spectrum,
    verify_spectrum,
)
from frametop.suites import birkhoff_suite, main_theorem_suite, random_monomorphism

from conftest import posets


def full_lattice(P):
    return Sublattice(P, P.open_masks())


def test_spectrum_examples(C3, A2):
    res = spectrum(full_lattice(C3))
    assert find_isomorphism(res.prim, C3) is not None
    # labels are the maximal points of the complements, so they match C3
    assert set(res.prim.points) == {"0", "1", "2"}
    assert res.prim.leq("0", "2")
    for u in open_sets(res.prim):
        assert set(res.member_for(u).labels) == set(u.labels)
    pt = spectrum(sublattice_closure(C3, []))
    assert len(pt.prim) == 1
    assert find_isomorphism(spectrum(full_lattice(A2)).prim, A2) is not None


def test_spectrum_iso_is_explicit(C3):
    om = sublattice_closure(C3, [["2"]])
    res = spectrum(om)
    assert verify_spectrum(res) is None
    for u in res.prim.open_masks():
        assert res.back[res.iso_to_input[u]] == u
    members = {m.mask for m in om}
    assert {res.member_for(u).mask for u in open_sets(res.prim)} == members


@given(posets(6))
@settings(max_examples=80, deadline=None)
def test_birkhoff_round_trip(X):
    om = full_lattice(X)
    res = spectrum(om)
    assert find_isomorphism(res.prim, X) is not None
    assert len(meet_irreducibles(om)) == len(X)


@given(posets(5))
@settings(max_examples=60, deadline=None)
def test_quotient_and_spectrum_agree(P):
    r = random.Random(len(P) * 31 + P.full)
    opens = P.open_masks()
    om = sublattice_closure(P, r.sample(opens, min(3, len(opens))))
    X, _ = quotient_space(om)
    assert find_isomorphism(X, spectrum(om).prim) is not None


def test_crossed_product_examples(C3, psi_SA2, S):
    res = crossed_product_ideals(identity_map(C3))
    assert set(res.omega.masks) == set(C3.open_masks())
    assert find_isomorphism(res.prim, C3) is not None
    pt = point_space()
    P = antichain(3)
    res = crossed_product_ideals(FrameMap(pt, P, {"pt": P.points}))
    assert res.omega.masks == (0, P.full)
    assert len(res.prim) == 1
    res = crossed_product_ideals(psi_SA2)
    assert [set(m.labels) for m in res.omega] == [set(), {"q"}, {"p", "q"}]
    assert find_isomorphism(res.prim, S) is not None
    assert res.fixed_points == frozenset(res.omega.masks)


def test_crossed_product_needs_I_to_IV(C3, A2):
    const = FrameMap(C3, A2, {p: ["p", "q"] for p in C3.points})
    with pytest.raises(ContractViolation, match="IV"):
        crossed_product_ideals(const)


def test_crossed_product_random_monomorphisms():
    r = random.Random(21)
    for _ in range(100):
        X, P, psi = random_monomorphism(r, 6)
        res = crossed_product_ideals(psi)
        assert find_isomorphism(res.prim, X) is not None


def test_main_theorem_suite_small():
    res = main_theorem_suite(n=3, random_count=50, random_points=5, seed=1)
    assert res.ok, res.line()


def test_birkhoff_suite_small():
    res = birkhoff_suite(samples=50, max_points=6, seed=2)
    assert res.ok and res.checked == 50


def test_regularity_examples(C3):
    assert regularity_check(sublattice_closure(C3, [["2"]]))
    assert regularity_check(sublattice_closure(C3, []))
    r = random.Random(4)
    for _ in range(30):
        P = random_poset(r.randint(1, 6), r)
        opens = P.open_masks()
        assert regularity_check(sublattice_closure(P, r.sample(opens, min(2, len(opens)))))


def test_regularity_hand_table_negatives():
    A = antichain(["p", "q"])
    table = {"0": [], "I": ["p"], "J": ["q"], "E": ["p", "q"]}
    assert regularity_check(table, A)
    # a join that is not the union of the traces
    bad = regularity_check(table, A, joins={("I", "J"): "I"})
    assert not bad and bad.separates and not bad.sums
    assert bad.witness == ("I", "J")
    # two ideals with the same trace
    same = regularity_check({"0": [], "I": ["p"], "K": ["p"], "E": ["p", "q"]}, A)
    assert not same and not same.separates
    assert same.witness == ("I", "K")
    # no ideal above both traces
    S = sierpinski()
    missing = regularity_check({"0": [], "a": ["1"]}, S)
    assert missing and missing.sums
    gap = regularity_check({"I": ["p"], "J": ["q"]}, A)
    assert not gap.sums


def test_regularity_hand_table_needs_space_andopen_sets(C3):
    with pytest.raises(ContractViolation, match="space"):
        regularity_check({"a": ["2"]})
    with pytest.raises(ContractViolation, match="not open"):
        regularity_check({"a": ["0"]}, chain(3))
