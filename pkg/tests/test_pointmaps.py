import random

import pytest
from hypothesis import given, settings, strategies as st

from frametop.errors import ContractViolation
from frametop.frames import FrameMap, check_properties, identity_map, pseudo_left_inverse
from frametop.pointmaps import (
    METHODS,
    PointMap,
    homeomorphism_from_isomorphism,
    induce_pi,
    induce_psi,
    is_pseudo_epi,
    is_pseudo_open,
    pseudo_graph,
    pseudo_epi_witness,
    pseudo_open_report,
)
from frametop.pointmaps import all_point_maps
from frametop.poset import antichain, closure, chain, point_space, random_poset
from frametop.suites import pseudo_open_suite, roundtrip_suite, spaces_up_to

from conftest import posets


def ident(space):
    return PointMap(space, space, {p: p for p in space.points})


def a3_to_c3():
    return PointMap(antichain(3), chain(3), {p: p for p in "012"}, "id")


@st.composite
def point_maps(draw, max_points=4):
    P = draw(posets(max_points))
    X = draw(posets(max_points))
    maps = list(all_point_maps(P, X))
    return draw(st.sampled_from(maps))


def test_continuity_enforced(S):
    with pytest.raises(ContractViolation, match="not continuous"):
        PointMap(S, S, {"0": "1", "1": "0"})
    with pytest.raises(ContractViolation, match="no value"):
        PointMap(S, S, {"0": "0"})


def test_pseudo_graph_examples(S):
    assert pseudo_graph(ident(S)).label_pairs == {("0", "0"), ("1", "1"), ("1", "0")}
    const = PointMap(chain(3), point_space(), {p: "pt" for p in "012"})
    assert len(pseudo_graph(const).pairs) == 9
    expected = {(p, q) for p in "012" for q in "012" if int(q) <= int(p)}
    assert pseudo_graph(a3_to_c3()).label_pairs == expected


@given(point_maps(5))
@settings(max_examples=80, deadline=None)
def test_pseudo_graph_reflexive_transitive(pi):
    pairs = pseudo_graph(pi).pairs
    n = len(pi.source)
    assert all((p, p) in pairs for p in range(n))
    for a, b in pairs:
        for c, d in pairs:
            if b == c:
                assert (a, d) in pairs


def test_pseudo_open_examples(S):
    pi = a3_to_c3()
    assert is_pseudo_open(pi)
    assert not pi.is_open_map()
    for method in METHODS:
        assert is_pseudo_open(pi, method)
    assert is_pseudo_open(ident(S))
    const = PointMap(S, point_space(), {"0": "pt", "1": "pt"})
    assert is_pseudo_open(const)


def test_unknown_method_rejected(S):
    with pytest.raises(ValueError):
        is_pseudo_open(ident(S), "nope")


def test_pseudo_open_is_automatic_for_finite_spaces(V):
    # finite intersections of opens are open, so no continuous map can fail
    pi = PointMap(V, chain(2), {"b": "0", "x": "0", "y": "1"})
    rep = pseudo_open_report(pi)
    assert rep.agree and rep.value and not rep.witnesses
    for P in spaces_up_to(3):
        for X in spaces_up_to(3):
            for m in all_point_maps(P, X):
                assert pseudo_open_report(m).value


def test_pseudo_epi_examples(S):
    assert is_pseudo_epi(a3_to_c3())
    closed_pt = PointMap(point_space(), S, {"pt": "0"})
    generic = PointMap(point_space(), S, {"pt": "1"})
    assert not is_pseudo_epi(closed_pt)
    # the generic point is dense in S but misses the closed set {0}
    assert not is_pseudo_epi(generic)
    w = pseudo_epi_witness(generic)
    assert w["dense"] == 1 and w["lattice"] == (0b10, 0b11)


def test_non_surjective_uses_definition(S):
    pi = PointMap(point_space(), S, {"pt": "1"})
    rep = pseudo_open_report(pi)
    assert rep.corestricted and rep.agree and rep.value


def test_induce_psi_examples(S):
    assert induce_psi(ident(S)).same_as(identity_map(S))
    psi = induce_psi(a3_to_c3())
    for k in range(3):
        up = [str(i) for i in range(k, 3)]
        assert set(psi(up).labels) == set(up)
    const = PointMap(chain(2), S, {"0": "1", "1": "1"})
    psi = induce_psi(const)
    assert set(psi(["1"]).labels) == {"0", "1"}
    assert set(psi([]).labels) == set()
    const = PointMap(chain(2), S, {"0": "0", "1": "0"})
    assert set(induce_psi(const)(["1"]).labels) == set()


def test_induce_pi_examples(psi_SA2, S):
    pi = induce_pi(psi_SA2)
    assert pi.assignment == {"p": "0", "q": "1"}
    assert induce_pi(identity_map(S)) == ident(S)
    const = PointMap(chain(2), S, {"0": "1", "1": "1"})
    assert induce_pi(induce_psi(const)) == const


def test_induce_pi_rejects_missing_properties(S, A2):
    bad = FrameMap(S, A2, {"0": ["q"], "1": ["q"]})
    with pytest.raises(ContractViolation, match="I0"):
        induce_pi(bad)


@given(point_maps(4))
@settings(max_examples=120, deadline=None)
def test_roundtrip_property(pi):
    psi = induce_psi(pi)
    rep = check_properties(psi)
    assert rep.I0 and rep.II0 and rep.III
    assert induce_pi(psi) == pi
    flags = rep.I and rep.II and rep.III and rep.IV
    assert flags == (is_pseudo_open(pi) and is_pseudo_epi(pi))


def test_roundtrip_suite_small():
    res = roundtrip_suite(3)
    assert res.ok, res.line()
    assert res.checked > 0


def test_pseudo_open_agreement_on_all_maps_small():
    # not only surjections: the definition route for non-surjective maps
    res = pseudo_open_suite(3, surjective_only=False)
    assert res.ok, res.line()


def test_family_reduction_matches_all_families():
    # pairs plus point-closure families against every subfamily of the lattice:
    # every surjection up to 3 points, a sample of those on 4 points
    from frametop.pointmaps import _check_closed_families, _check_open_families

    for pi in _surjections(3) + _surjections(4, sample=3):
        assert (_check_closed_families(pi) is None) == (_check_closed_families(pi, "all") is None)
        assert (_check_open_families(pi) is None) == (_check_open_families(pi, "all") is None)


def _surjections(n, sample=None):
    r = random.Random(4)
    spaces = spaces_up_to(n)
    out = []
    for P in spaces:
        for X in spaces:
            if len(X) > len(P) or (sample and len(P) < n):
                continue
            maps = [m for m in all_point_maps(P, X) if m.is_surjective()]
            out.extend(r.sample(maps, min(sample, len(maps))) if sample else maps)
    return out


def test_t1_target_remark():
    # discrete target: pseudo-open implies open, pseudo-epi implies onto
    r = random.Random(9)
    for _ in range(200):
        P = random_poset(r.randint(1, 5), r)
        X = antichain(r.randint(1, 3))
        for pi in all_point_maps(P, X):
            if is_pseudo_open(pi):
                assert pi.is_open_map()
            if is_pseudo_epi(pi):
                assert pi.is_surjective()


def test_lattice_iso_gives_unique_homeomorphism():
    r = random.Random(12)
    for _ in range(60):
        X = random_poset(r.randint(1, 5), r)
        perm = list(range(len(X)))
        r.shuffle(perm)
        Y = X.permuted(perm)
        homeos = [m for m in all_point_maps(Y, X) if m.is_homeomorphism()]
        target = homeos[0]
        psi = induce_psi(target)
        pi = homeomorphism_from_isomorphism(psi)
        assert pi == target
        # any other homeomorphism induces a different lattice map
        for other in homeos[1:]:
            if other != target:
                assert not induce_psi(other).same_as(psi)


def test_homeomorphism_needs_isomorphism(psi_SA2):
    with pytest.raises(ContractViolation):
        homeomorphism_from_isomorphism(psi_SA2)


def test_phi_and_pi_agree_on_closed_sets(psi_SA2):
    phi = pseudo_left_inverse(psi_SA2)
    pi = induce_pi(psi_SA2)
    X, P = psi_SA2.source, psi_SA2.target
    for i, p in enumerate(P.points):
        f = X.full & ~phi.image_mask(P.full & ~P.down[i])
        assert set(X.sorted_labels(f)) == closure(X, {pi(p)})
