import random

import pytest
from hypothesis import strategies as st

from frametop.poset import FinitePoset, antichain, chain, sierpinski
from frametop.frames import FrameMap


@pytest.fixture
def S():
    return sierpinski()


@pytest.fixture
def A2():
    return antichain(["p", "q"], "A2")


@pytest.fixture
def C3():
    return chain(3)


@pytest.fixture
def V():
    return FinitePoset.from_relation(["b", "x", "y"], [("b", "x"), ("b", "y")], "V")


@pytest.fixture
def psi_SA2(S, A2):
    return FrameMap(S, A2, {"0": ["p", "q"], "1": ["q"]}, "Psi")


@st.composite
def posets(draw, max_points=5, min_points=1):
    n = draw(st.integers(min_points, max_points))
    pts = [str(i) for i in range(n)]
    pairs = [(pts[i], pts[j]) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
    space = FinitePoset.from_relation(pts, pairs, f"H{n}")
    perm = draw(st.permutations(list(range(n))))
    return space.permuted(list(perm))


@st.composite
def frame_maps(draw, max_points=4):
    """Arbitrary basis-valid map between two drawn spaces."""
    X = draw(posets(max_points))
    P = draw(posets(max_points))
    opens = P.open_masks()
    basis = [0] * len(X)
    # assign along a linear extension so that a <= b forces B(b) inside B(a)
    order = sorted(range(len(X)), key=lambda i: bin(X.down[i]).count("1"))
    for i in order:
        below = [basis[a] for a in range(len(X)) if a != i and X.down[i] >> a & 1]
        cands = [v for v in opens if all(v & ~b == 0 for b in below)]
        basis[i] = draw(st.sampled_from(cands))
    return FrameMap(X, P, dict(zip(X.points, basis)))


def rng(seed=0):
    return random.Random(seed)
