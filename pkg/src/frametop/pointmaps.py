"""Continuous maps between finite T0-spaces and their pseudo-graphs.

A map between finite T0-spaces is continuous exactly when it is monotone for
the specialization orders (preimages of up-sets are up-sets), so continuity is
enforced once, at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .errors import ConsistencyError, ContractViolation, ResourceError, TheoremViolation
from .frames import FrameMap, LatticeMap, check_properties, pseudo_left_inverse
from .poset import FinitePoset, OpenSet, bits, generic_point, popcount

METHODS = ("closed-families", "open-families", "invariant-opens", "fg-closed")

# subsets of a space are enumerated for the lsc criterion only up to this size
MAX_SUBSET_POINTS = 14


class PointMap:
    """Continuous map ``source -> target`` given by a label assignment."""

    def __init__(self, source: FinitePoset, target: FinitePoset, assignment: Mapping[str, str], name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        missing = [p for p in source.points if p not in assignment]
        if missing:
            raise ContractViolation(f"map {name!r}: no value for point {missing[0]!r}")
        extra = set(assignment) - set(source.points)
        if extra:
            raise ContractViolation(f"map {name!r}: values given for unknown points {sorted(extra)}")
        self.assign = tuple(target.index_of(assignment[p]) for p in source.points)
        for b, d in enumerate(source.down):
            for a in bits(d):
                if not target.down[self.assign[b]] >> self.assign[a] & 1:
                    raise ContractViolation(
                        f"map {name!r} is not continuous: {source.points[a]} <= {source.points[b]} "
                        f"but {target.points[self.assign[a]]} is not <= {target.points[self.assign[b]]}"
                    )

    @classmethod
    def from_indices(cls, source, target, assign, name=""):
        return cls(source, target, {p: target.points[j] for p, j in zip(source.points, assign)}, name)

    def __call__(self, label: str) -> str:
        return self.target.points[self.assign[self.source.index_of(label)]]

    @property
    def assignment(self) -> dict[str, str]:
        return {p: self.target.points[j] for p, j in zip(self.source.points, self.assign)}

    def preimage_mask(self, xmask: int) -> int:
        out = 0
        for i, j in enumerate(self.assign):
            if xmask >> j & 1:
                out |= 1 << i
        return out

    def image_mask(self, pmask: int) -> int:
        out = 0
        for i in bits(pmask):
            out |= 1 << self.assign[i]
        return out

    def preimage(self, u) -> OpenSet:
        m = u.mask if isinstance(u, OpenSet) else self.target.mask_of(u)
        if not self.target.is_up(m):
            raise ContractViolation(f"{self.target.sorted_labels(m)} is not open")
        return OpenSet(self.source, self.preimage_mask(m))

    @property
    def image(self) -> int:
        return self.image_mask(self.source.full)

    def is_surjective(self) -> bool:
        return self.image == self.target.full

    def is_open_map(self) -> bool:
        """Images of open sets are open."""
        return all(self.target.is_up(self.image_mask(u)) for u in self.source.open_masks())

    def is_homeomorphism(self) -> bool:
        if len(set(self.assign)) != len(self.assign) or not self.is_surjective():
            return False
        inv = {j: i for i, j in enumerate(self.assign)}
        return all(
            self.source.down[inv[b]] >> inv[a] & 1
            for b, d in enumerate(self.target.down)
            for a in bits(d)
        )

    def corestriction(self) -> "PointMap":
        """The same map onto its image, with the subspace topology."""
        sub = self.target.subspace(self.image, name=f"{self.target.name}|image")
        return PointMap(self.source, sub, self.assignment, f"{self.name}|image")

    def __eq__(self, other):
        if not isinstance(other, PointMap):
            return NotImplemented
        return (self.source, self.target, self.assign) == (other.source, other.target, other.assign)

    def __hash__(self):
        return hash((self.source, self.target, self.assign))

    def __repr__(self):
        body = ", ".join(f"{p}->{x}" for p, x in self.assignment.items())
        return f"PointMap({self.name} {self.source.name}->{self.target.name}: {body})"


@dataclass(frozen=True)
class PseudoGraph:
    """``R = {(p, q) : pi(q) in cl{pi(p)}}`` as index pairs of the source."""

    base: PointMap
    pairs: frozenset[tuple[int, int]]

    @property
    def label_pairs(self) -> set[tuple[str, str]]:
        pts = self.base.source.points
        return {(pts[p], pts[q]) for p, q in self.pairs}

    def fibre(self, p: int) -> int:
        """``lambda(p) = {q : (p, q) in R}`` as a mask."""
        out = 0
        for a, q in self.pairs:
            if a == p:
                out |= 1 << q
        return out

    def is_invariant(self, mask: int) -> bool:
        """``q in Z`` and ``(p, q) in R`` imply ``p in Z``."""
        return all(mask >> p & 1 for p, q in self.pairs if mask >> q & 1)

    def as_space(self) -> FinitePoset:
        """``R`` with the subspace topology of the product, i.e. the componentwise order."""
        pts = self.base.source.points
        elems = sorted(self.pairs)
        labels = [f"{pts[p]}_{pts[q]}" for p, q in elems]
        down = self.base.source.down
        rel = [
            (labels[a], labels[b])
            for a, (p1, q1) in enumerate(elems)
            for b, (p2, q2) in enumerate(elems)
            if down[p2] >> p1 & 1 and down[q2] >> q1 & 1
        ]
        return FinitePoset.from_relation(labels, rel, "R")


def pseudo_graph(pi: PointMap) -> PseudoGraph:
    X = pi.target
    n = len(pi.source)
    pairs = frozenset(
        (p, q) for p in range(n) for q in range(n) if X.down[pi.assign[p]] >> pi.assign[q] & 1
    )
    return PseudoGraph(pi, pairs)


def _subsets(mask: int):
    """All submasks of ``mask``."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def lsc_criterion_witness(space: FinitePoset, fibres, closure) -> tuple[int, int] | None:
    """Check that ``y -> fibres[y]`` is lower semicontinuous.

    For every subset ``V`` of ``space`` and every ``y`` in its closure,
    ``fibres[y]`` must lie in ``closure(union of fibres[v], v in V)``.  This is
    the criterion for the first projection of the relation
    ``{(y, z) : z in fibres[y]}`` to be open.  Returns ``(V, y)`` on failure.
    """
    n = len(space)
    if n > MAX_SUBSET_POINTS:
        raise ResourceError(f"subset scan over {n} points exceeds the bound {MAX_SUBSET_POINTS}")
    for vmask in _subsets(space.full):
        union = 0
        for v in bits(vmask):
            union |= fibres[v]
        cl_union = closure(union)
        for y in bits(space.down_closure(vmask)):
            if fibres[y] & ~cl_union:
                return vmask, y
    return None


def projection_is_open(space: FinitePoset, fibres, closure) -> bool:
    return lsc_criterion_witness(space, fibres, closure) is None


@dataclass
class PseudoOpenReport:
    results: dict[str, bool]
    corestricted: bool
    witnesses: dict[str, object] = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return len(set(self.results.values())) <= 1

    @property
    def value(self) -> bool:
        return all(self.results.values())

    def __bool__(self):
        return self.value


def _closed_masks(space: FinitePoset):
    return [space.full & ~u for u in space.open_masks()]


def _check_closed_families(pi: PointMap, families: str = "generated"):
    """(i): ``cl(U pi^-1 F_a) = pi^-1(cl(U F_a))`` over families of closed sets.

    ``families='generated'`` uses every pair ``F <= F'`` and every family of
    point closures ``{cl{z} : z in Z}`` (arbitrary families of closed sets are
    unions of such).  ``families='all'`` enumerates every subfamily of the
    closed-set lattice.
    """
    P, X = pi.source, pi.target
    closed = _closed_masks(X)

    def holds(fam):
        union_x = union_p = 0
        for f in fam:
            union_x |= f
            union_p |= pi.preimage_mask(f)
        return P.down_closure(union_p) == pi.preimage_mask(X.down_closure(union_x))

    if families == "all":
        for r in range(len(closed) + 1):
            for fam in combinations(closed, r):
                if not holds(fam):
                    return fam
        return None
    for f in closed:
        for g in closed:
            if f & ~g == 0 and not holds((f, g)):
                return (f, g)
    for zmask in _subsets(X.full):
        fam = [X.down[z] for z in bits(zmask)]
        if not holds(fam):
            return tuple(fam)
    return None


def _check_open_families(pi: PointMap, families: str = "generated"):
    """(ii): ``(n pi^-1 U_a)° = pi^-1((n U_a)°)`` over families of open sets."""
    P, X = pi.source, pi.target
    opens = list(X.open_masks())

    def holds(fam):
        inter_x, inter_p = X.full, P.full
        for u in fam:
            inter_x &= u
            inter_p &= pi.preimage_mask(u)
        return P.interior_mask(inter_p) == pi.preimage_mask(X.interior_mask(inter_x))

    if families == "all":
        for r in range(len(opens) + 1):
            for fam in combinations(opens, r):
                if not holds(fam):
                    return fam
        return None
    for u in opens:
        for v in opens:
            if v & ~u == 0 and not holds((u, v)):
                return (u, v)
    for zmask in _subsets(X.full):
        fam = [X.full & ~X.down[z] for z in bits(zmask)]
        if not holds(fam):
            return tuple(fam)
    return None


def _check_invariant_opens(pi: PointMap):
    """(iii): first projection of ``R`` open and every invariant open a preimage."""
    P, X = pi.source, pi.target
    graph = pseudo_graph(pi)
    fibres = [graph.fibre(p) for p in range(len(P))]
    bad = lsc_criterion_witness(P, fibres, P.down_closure)
    if bad is not None:
        return ("projection not open", bad)
    preimages = {pi.preimage_mask(u) for u in X.open_masks()}
    for v in P.open_masks():
        if graph.is_invariant(v) and v not in preimages:
            return ("invariant open is not a preimage", v)
    return None


def _check_definition(pi: PointMap):
    """Defining route: projection open, and ``pi(V)`` open in ``pi(P)`` for invariant open ``V``."""
    P, X = pi.source, pi.target
    graph = pseudo_graph(pi)
    fibres = [graph.fibre(p) for p in range(len(P))]
    bad = lsc_criterion_witness(P, fibres, P.down_closure)
    if bad is not None:
        return ("projection not open", bad)
    img = pi.image
    for v in P.open_masks():
        if graph.is_invariant(v):
            w = pi.image_mask(v)
            # open in the subspace pi(P): w = U n pi(P) for some up-set U
            if X.up_closure(w) & img != w:
                return ("image of invariant open not open in the image", v)
    return None


def _check_fg_closed(pi: PointMap):
    """(iv): ``F_G = {x : pi^-1(cl{x}) <= G}`` is closed for every closed ``G``."""
    P, X = pi.source, pi.target
    for g in _closed_masks(P):
        fg = 0
        for x in range(len(X)):
            if pi.preimage_mask(X.down[x]) & ~g == 0:
                fg |= 1 << x
        if not X.is_down(fg):
            return g
    return None


def pseudo_open_report(pi: PointMap, families: str = "generated") -> PseudoOpenReport:
    """Run all four characterizations of pseudo-openness.

    The characterizations assume a surjection; for other maps the
    family-based and ``F_G`` checks run on the corestriction onto the image
    and the invariant-open check uses the defining condition on ``pi`` itself.
    """
    corestricted = not pi.is_surjective()
    base = pi.corestriction() if corestricted else pi
    found = {
        "closed-families": _check_closed_families(base, families),
        "open-families": _check_open_families(base, families),
        "invariant-opens": _check_definition(pi) if corestricted else _check_invariant_opens(base),
        "fg-closed": _check_fg_closed(base),
    }
    return PseudoOpenReport(
        {m: w is None for m, w in found.items()},
        corestricted,
        {m: w for m, w in found.items() if w is not None},
    )


def is_pseudo_open(pi: PointMap, method: str = "all") -> bool:
    if method == "all":
        report = pseudo_open_report(pi)
        if not report.agree:
            raise ConsistencyError(f"pseudo-open characterizations disagree: {report.results}")
        return report.value
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS + ('all',)}")
    corestricted = not pi.is_surjective()
    base = pi.corestriction() if corestricted else pi
    if method == "closed-families":
        return _check_closed_families(base) is None
    if method == "open-families":
        return _check_open_families(base) is None
    if method == "invariant-opens":
        return (_check_definition(pi) if corestricted else _check_invariant_opens(base)) is None
    return _check_fg_closed(base) is None


def pseudo_epi_witness(pi: PointMap) -> dict[str, object]:
    """Both pseudo-epimorphism tests; each entry is None or a failure witness."""
    X = pi.target
    img = pi.image
    dense = None
    for f in _closed_masks(X):
        if X.down_closure(img & f) != f:
            dense = f
            break
    traces: dict[int, int] = {}
    lattice = None
    for u in X.open_masks():
        t = u & img
        if t in traces:
            lattice = (traces[t], u)
            break
        traces[t] = u
    return {"dense": dense, "lattice": lattice}


def is_pseudo_epi(pi: PointMap) -> bool:
    """``pi(P) n F`` is dense in every closed ``F``; cross-checked against
    injectivity of ``U -> U n pi(P)``."""
    w = pseudo_epi_witness(pi)
    dense_ok, lattice_ok = w["dense"] is None, w["lattice"] is None
    if dense_ok != lattice_ok:
        raise ConsistencyError(f"pseudo-epimorphism tests disagree: {w}")
    return dense_ok


def induce_psi(pi: PointMap) -> FrameMap:
    """The inverse-image map ``U -> pi^-1(U)`` in basis form."""
    X = pi.target
    images = {x: pi.preimage_mask(X.up[j]) for j, x in enumerate(X.points)}
    return FrameMap(X, pi.source, images, f"Psi[{pi.name}]" if pi.name else "Psi")


def induce_pi(psi: LatticeMap) -> PointMap:
    """Recover the point map of a map with (I0), (II0), (III).

    For each point ``p`` the closed set ``X minus Phi(P minus cl{p})`` is prime
    and ``pi(p)`` is its generic point.  The result is checked to satisfy
    ``pi^-1(U) = Psi(U)`` for all open ``U`` before it is returned.
    """
    report = check_properties(psi)
    for flag in ("I0", "II0", "III"):
        if not getattr(report, flag):
            raise ContractViolation(
                f"induce_pi needs property ({flag}); witness {report.counterexamples[flag]}"
            )
    X, P = psi.source, psi.target
    phi = pseudo_left_inverse(psi)
    assign = {}
    for i, p in enumerate(P.points):
        f = X.full & ~phi.image_mask(P.full & ~P.down[i])
        labels = X.sorted_labels(f)
        try:
            assign[p] = generic_point(X, labels)
        except ContractViolation as exc:
            raise TheoremViolation("closed set assigned to a point is not prime", (p, labels)) from exc
    pi = PointMap(P, X, assign, f"pi[{psi.name}]" if psi.name else "pi")
    for u, v in psi.mask_table.items():
        if pi.preimage_mask(u) != v:
            raise TheoremViolation(
                "recovered map does not reproduce Psi", (X.sorted_labels(u), P.sorted_labels(v))
            )
    return pi


def homeomorphism_from_isomorphism(psi: LatticeMap) -> PointMap:
    """The unique homeomorphism ``pi`` with ``Psi(U) = pi^-1(U)`` for a lattice
    isomorphism ``latO(X) -> latO(Y)``."""
    report = check_properties(psi)
    onto = set(psi.mask_table.values()) == set(psi.target.open_masks())
    if not (report.lattice_monomorphism and onto):
        raise ContractViolation("map is not a lattice isomorphism onto latO(target)")
    pi = induce_pi(psi)
    if not pi.is_homeomorphism():
        raise TheoremViolation("map induced by a lattice isomorphism is not a homeomorphism", pi)
    return pi


def all_point_maps(source: FinitePoset, target: FinitePoset):
    """Every continuous map ``source -> target`` (backtracking over monotone assignments)."""
    n = len(source)
    order = sorted(range(n), key=lambda i: (popcount(source.down[i]), i))
    assign = [None] * n
    m = len(target)

    def walk(k):
        if k == n:
            yield PointMap.from_indices(source, target, list(assign))
            return
        i = order[k]
        for j in range(m):
            ok = True
            for a in bits(source.down[i] & ~(1 << i)):
                if assign[a] is not None and not target.down[j] >> assign[a] & 1:
                    ok = False
                    break
            if ok:
                assign[i] = j
                yield from walk(k + 1)
                assign[i] = None

    yield from walk(0)
