import random

import pytest
from hypothesis import given, settings

from frametop.errors import ContractViolation, InputError, ResourceError
from frametop.poset import (
    FinitePoset,
    OpenSet,
    antichain,
    chain,
    closure,
    find_isomorphism,
    generic_point,
    interior,
    is_homeomorphic,
    is_prime_closed,
    is_sober,
    open_sets,
    point_space,
    posets_up_to_iso,
    prime_closed_sets,
    random_poset,
)

from conftest import posets
from oracles import closure as oclosure, interior as ointerior, is_iso_brute, is_prime_by_decomposition, up_sets


def test_closure_examples(S, V):
    assert closure(S, {"1"}) == {"0", "1"}
    assert closure(S, set()) == frozenset()
    assert closure(V, {"x"}) == {"b", "x"}
    assert oclosure(V, {"x"}) == {"b", "x"}


def test_closure_unknown_label(S):
    with pytest.raises(InputError):
        closure(S, {"7"})


def test_interior_examples(S, C3):
    assert interior(S, {"0"}).labels == frozenset()
    assert interior(S, {"0", "1"}).labels == {"0", "1"}
    assert interior(C3, {"0", "2"}).labels == {"2"}
    assert ointerior(C3, frozenset({"0", "2"})) == {"2"}


def test_open_sets_examples(S, A2, C3):
    assert [u.labels for u in open_sets(S)] == [set(), {"1"}, {"0", "1"}]
    assert len(open_sets(A2)) == 4
    assert [u.labels for u in open_sets(C3)] == [set(), {"2"}, {"1", "2"}, {"0", "1", "2"}]


def test_open_sets_sorted_by_size_then_mask():
    X = random_poset(6, random.Random(3))
    masks = [u.mask for u in open_sets(X)]
    assert masks == sorted(masks, key=lambda m: (bin(m).count("1"), m))


def test_open_sets_bound():
    big = antichain(8)
    with pytest.raises(ResourceError, match="7"):
        open_sets(big, max_points=7)


def test_prime_examples(S, V):
    assert is_prime_closed(S, {"0", "1"})
    assert not is_prime_closed(V, {"b", "x", "y"})
    assert generic_point(S, {"0", "1"}) == "1"
    assert prime_closed_sets(V) == [{"b"}, {"b", "x"}, {"b", "y"}]
    assert prime_closed_sets(antichain(["p", "q"])) == [{"p"}, {"q"}]


def test_prime_contract(S, V):
    with pytest.raises(ContractViolation):
        is_prime_closed(S, {"1"})  # not closed
    with pytest.raises(ContractViolation):
        is_prime_closed(S, set())
    with pytest.raises(ContractViolation):
        generic_point(V, {"b", "x", "y"})


def test_cycle_is_t0_violation():
    with pytest.raises(InputError, match="T0"):
        FinitePoset.from_relation(["a", "b"], [("a", "b"), ("b", "a")])


def test_duplicate_labels_rejected():
    with pytest.raises(InputError):
        FinitePoset.from_relation(["a", "a"], [])


def test_openset_must_be_up_closed(C3):
    with pytest.raises((ContractViolation, InputError)):
        OpenSet.of(C3, ["1"])


@given(posets(5))
@settings(max_examples=60, deadline=None)
def test_open_sets_match_power_set_filter(X):
    assert {u.labels for u in open_sets(X)} == set(up_sets(X))


@given(posets(5))
@settings(max_examples=60, deadline=None)
def test_closure_interior_laws(X):
    pts = list(X.points)
    r = random.Random(len(pts))
    for _ in range(8):
        s = {p for p in pts if r.random() < 0.5}
        t = s | {p for p in pts if r.random() < 0.3}
        cl = closure(X, s)
        assert cl == oclosure(X, s)
        assert closure(X, cl) == cl
        assert closure(X, s) <= closure(X, t)
        it = interior(X, s).labels
        assert it == ointerior(X, frozenset(s))
        assert interior(X, it).labels == it
        assert interior(X, s).labels <= interior(X, t).labels
        # interior is the complement of the closure of the complement
        comp = set(pts) - s
        assert it == set(pts) - closure(X, comp)


@given(posets(6))
@settings(max_examples=60, deadline=None)
def test_point_closures_distinct(X):
    cls = [closure(X, {p}) for p in X.points]
    assert len(set(cls)) == len(cls)


@given(posets(5))
@settings(max_examples=40, deadline=None)
def test_prime_matches_decomposition_oracle(X):
    from oracles import down_sets

    for f in down_sets(X):
        if f:
            assert is_prime_closed(X, f) == is_prime_by_decomposition(X, f)
    assert {frozenset(f) for f in prime_closed_sets(X)} == {closure(X, {p}) for p in X.points}


def test_sober_random_spaces():
    r = random.Random(11)
    for _ in range(200):
        assert is_sober(random_poset(r.randint(1, 8), r))


@given(posets(5))
@settings(max_examples=40, deadline=None)
def test_open_lattice_closed(X):
    opens = {u.labels for u in open_sets(X)}
    assert frozenset() in opens and frozenset(X.points) in opens
    for u in opens:
        for v in opens:
            assert u | v in opens and u & v in opens


def test_iso_class_counts():
    # number of unlabelled posets on 1..5 points
    assert [len(posets_up_to_iso(n)) for n in range(1, 6)] == [1, 2, 5, 16, 63]


def test_iso_classes_pairwise_distinct():
    reps = posets_up_to_iso(4)
    for i, a in enumerate(reps):
        for b in reps[i + 1:]:
            assert not is_iso_brute(a, b)


@given(posets(5), posets(5))
@settings(max_examples=80, deadline=None)
def test_find_isomorphism_against_brute_force(a, b):
    found = find_isomorphism(a, b)
    assert (found is not None) == is_iso_brute(a, b)
    if found is not None:
        for x in a.points:
            for y in a.points:
                assert a.leq(x, y) == b.leq(found[x], found[y])


def test_permuted_copy_is_homeomorphic():
    r = random.Random(5)
    for _ in range(30):
        X = random_poset(r.randint(1, 7), r)
        perm = list(range(len(X)))
        r.shuffle(perm)
        assert is_homeomorphic(X, X.permuted(perm))


def test_point_space_and_chain():
    assert len(open_sets(point_space())) == 2
    assert chain(4).leq("0", "3") and not chain(4).leq("3", "0")
