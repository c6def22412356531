"""Exhaustive and seeded-random verification suites.

Each suite returns a :class:`SuiteResult`.  The CLI ``selftest`` verb and the
acceptance tests both run them; sizes are parameters so small runs stay fast.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .dini import ScalarFunction, dini_report, is_lsc
from .equivariant import (
    FaceFamily,
    _openness_core,
    check_II_via_openness,
    dirac_witness,
    openness_agrees,
    separating_witness,
)
from .errors import FrametopError
from .frames import (
    FrameMap,
    TableMap,
    basis_assignments,
    check_properties,
    compose,
    identity_map,
    monotone_tables,
    pseudo_left_inverse,
    random_monotone_table,
    retraction,
    sublattice_closure,
    quotient_space,
    Sublattice,
)
from .poset import FinitePoset, bits, find_isomorphism, posets_up_to_iso, random_poset
from .pointmaps import (
    all_point_maps,
    induce_pi,
    induce_psi,
    is_pseudo_epi,
    pseudo_open_report,
)
from .synthesis import crossed_product_ideals, spectrum


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    note: str = ""

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, what):
        # keep reports short; the count is what matters after the first few
        if len(self.failures) < 20:
            self.failures.append(what)
        else:
            self.failures.append(None)

    def line(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        extra = f" ({self.note})" if self.note else ""
        return f"{verdict} {self.name}: {self.checked} checked, {len(self.failures)} failures{extra}"


def _timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.elapsed = time.perf_counter() - t0
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def spaces_up_to(n: int) -> list[FinitePoset]:
    out = []
    for k in range(1, n + 1):
        out.extend(posets_up_to_iso(k))
    return out


def table_from_basis(X: FinitePoset, basis) -> dict[int, int]:
    tab = {}
    for u in X.open_masks():
        m = 0
        for i in bits(u):
            m |= basis[i]
        tab[u] = m
    return tab


def _pairs_hold_II0(X: FinitePoset, P: FinitePoset, tab) -> bool:
    opens = X.open_masks()
    for k, u in enumerate(opens):
        for v in opens[k + 1:]:
            if tab[u & v] != P.interior_mask(tab[u] & tab[v]):
                return False
    return True


def _injective(tab) -> bool:
    return len(set(tab.values())) == len(tab)


def point_map_frames(n: int):
    """Basis-valid maps with (I0), (II0), (III) over spaces of at most ``n`` points.

    Filters every basis assignment with a direct table test; yields
    ``(X, P, FrameMap)``.
    """
    spaces = spaces_up_to(n)
    for X in spaces:
        for P in spaces:
            for basis in basis_assignments(X, P):
                tab = table_from_basis(X, basis)
                if tab[X.full] != P.full or not _pairs_hold_II0(X, P, tab):
                    continue
                yield X, P, FrameMap(X, P, dict(zip(X.points, basis)))


def lattice_monomorphisms(n: int):
    """Basis-valid maps with (I)-(IV) over spaces of at most ``n`` points."""
    for X, P, psi in point_map_frames(n):
        tab = psi.mask_table
        if not _injective(tab):
            continue
        if any(tab[u] == P.full for u in X.open_masks() if u != X.full):
            continue
        yield X, P, psi


def random_monomorphism(rng: random.Random, max_points: int):
    """Random map with (I)-(IV): the quotient map of a random sublattice."""
    P = random_poset(rng.randint(1, max_points), rng)
    opens = P.open_masks()
    seed = rng.sample(opens, min(len(opens), rng.randint(0, 3)))
    omega = sublattice_closure(P, seed)
    X, psi = quotient_space(omega)
    return X, P, psi


@_timed
def roundtrip_suite(n: int = 4) -> SuiteResult:
    """induce_pi then induce_psi is the identity and ``pi^-1 U = Psi(U)``.

    The number of maps found must equal the number of continuous maps
    ``P -> X`` counted independently.
    """
    res = SuiteResult(f"round trips, spaces <= {n} points")
    spaces = spaces_up_to(n)
    expected = sum(1 for X in spaces for P in spaces for _ in all_point_maps(P, X))
    for X, P, psi in point_map_frames(n):
        res.checked += 1
        try:
            pi = induce_pi(psi)
            back = induce_psi(pi)
            if back.basis != psi.basis:
                res.fail(("round trip differs", psi))
            for u, v in psi.mask_table.items():
                if pi.preimage_mask(u) != v:
                    res.fail(("preimage differs", psi, u))
        except FrametopError as exc:
            res.fail((repr(exc), psi))
    if res.checked != expected:
        res.fail(("count mismatch", res.checked, expected))
    res.note = f"{expected} continuous maps"
    return res


def _surjections(n: int, surjective_only: bool = True):
    spaces = spaces_up_to(n)
    for P in spaces:
        for X in spaces:
            if surjective_only and len(X) > len(P):
                continue
            for pi in all_point_maps(P, X):
                if surjective_only and not pi.is_surjective():
                    continue
                yield pi


@_timed
def pseudo_open_suite(n: int = 4, surjective_only: bool = True) -> SuiteResult:
    """Four characterizations agree and ``(pseudo-open and pseudo-epi) <=> (I)-(IV)``."""
    kind = "surjections" if surjective_only else "continuous maps"
    res = SuiteResult(f"pseudo-open agreement, {kind} <= {n} points")
    for pi in _surjections(n, surjective_only):
        res.checked += 1
        try:
            rep = pseudo_open_report(pi)
            if not rep.agree:
                res.fail(("methods disagree", pi, rep.results))
                continue
            lhs = rep.value and is_pseudo_epi(pi)
            rhs = check_properties(induce_psi(pi)).lattice_monomorphism
            if lhs != rhs:
                res.fail(("correspondence fails", pi, lhs, rhs))
        except FrametopError as exc:
            res.fail((repr(exc), pi))
    return res


def _main_theorem_one(res: SuiteResult, X, psi):
    res.checked += 1
    try:
        out = crossed_product_ideals(psi)
        if find_isomorphism(out.prim, X) is None:
            res.fail(("prim not homeomorphic to X", psi))
        if out.fixed_points != frozenset(out.omega.masks):
            res.fail(("fixed points differ from omega", psi))
    except FrametopError as exc:
        res.fail((repr(exc), psi))


@_timed
def main_theorem_suite(n: int = 4, random_count: int = 1000, random_points: int = 7, seed: int = 0) -> SuiteResult:
    res = SuiteResult(f"main theorem, exhaustive <= {n} points + {random_count} random <= {random_points}")
    for X, _, psi in lattice_monomorphisms(n):
        _main_theorem_one(res, X, psi)
    rng = random.Random(seed)
    for _ in range(random_count):
        X, _, psi = random_monomorphism(rng, random_points)
        _main_theorem_one(res, X, psi)
    return res


def _phi_laws(X: FinitePoset, P: FinitePoset, psi, flags) -> str | None:
    """Which law fails for ``psi``, or None.  ``flags`` is its property report."""
    phi = pseudo_left_inverse(psi)
    ps, ph = psi.mask_table, phi.mask_table
    xo, po = X.open_masks(), P.open_masks()
    for v in po:
        if ps[ph[v]] & ~v:
            return "(a) Psi(Phi(V)) inside V"
        if ph[ps[ph[v]]] != ph[v]:
            return "(d) Phi Psi Phi = Phi"
    for u in xo:
        if u & ~ph[ps[u]]:
            return "(a) U inside Phi(Psi(U))"
        if ps[ph[ps[u]]] != ps[u]:
            return "(d) Psi Phi Psi = Psi"
    if {v for v in po if ph[v] == X.full} != {P.full}:
        return "(b) Phi^-1(X) = {P}"
    biggest = 0
    for u in xo:
        if ps[u] == 0:
            biggest |= u
    if ph[0] != biggest:
        return "(b) Phi(empty)"
    for k, v in enumerate(po):
        for w in po[k:]:
            if ph[P.interior_mask(v & w)] != X.interior_mask(ph[v] & ph[w]):
                return "(c) Phi preserves interiors of intersections"
    if flags.II0:
        for v in po:
            # interior in the Psi-topology: union of the Psi(U) inside V
            core = 0
            for u in xo:
                if ps[u] & ~v == 0:
                    core |= ps[u]
            if ps[ph[v]] != core:
                return "(e) Psi(Phi(V)) = Psi-interior of V"
            if ph[v] != ph[core]:
                return "(e) Phi(V) = Phi(Psi-interior of V)"
    if flags.IV and any(ph[ps[u]] != u for u in xo):
        return "Phi o Psi = id for injective Psi"
    return None


@_timed
def phi_suite(n: int = 4, random_count: int = 1000, random_points: int = 7, seed: int = 0) -> SuiteResult:
    """Pseudo-left-inverse laws on every map with (I0), (II0), (III) at ``<= n``
    points, on every union-preserving map with (I0) at ``<= min(n, 3)`` points,
    and on the random (I)-(IV) instances."""
    res = SuiteResult(f"Phi laws <= {n} points + {random_count} random")

    def one(X, P, psi):
        res.checked += 1
        try:
            bad = _phi_laws(X, P, psi, check_properties(psi))
            if bad:
                res.fail((bad, psi))
        except FrametopError as exc:
            res.fail((repr(exc), psi))

    for X, P, psi in point_map_frames(n):
        one(X, P, psi)
    small = spaces_up_to(min(n, 3))
    for X in small:
        for P in small:
            for basis in basis_assignments(X, P):
                psi = FrameMap(X, P, dict(zip(X.points, basis)))
                if psi.image_mask(X.full) == P.full:
                    one(X, P, psi)
    rng = random.Random(seed)
    for _ in range(random_count):
        X, P, psi = random_monomorphism(rng, random_points)
        one(X, P, psi)
    return res


@_timed
def birkhoff_suite(samples: int = 500, max_points: int = 7, seed: int = 0) -> SuiteResult:
    res = SuiteResult(f"Birkhoff round trip, {samples} random spaces <= {max_points} points")
    rng = random.Random(seed)
    for _ in range(samples):
        X = random_poset(rng.randint(1, max_points), rng)
        res.checked += 1
        try:
            spec = spectrum(Sublattice(X, X.open_masks(), "latO"))
            if find_isomorphism(spec.prim, X) is None:
                res.fail(("not homeomorphic", X))
        except FrametopError as exc:
            res.fail((repr(exc), X))
    return res


# pairs of lattice sizes whose full monotone-table enumeration is too large
SAMPLED_PAIRS = ((4, 3), (4, 4))


@_timed
def openness_suite(n: int = 4, samples: int = 20000, seed: int = 0, witness_points: int = 4) -> SuiteResult:
    """(II) versus the relation-side condition.

    Exhaustive over every union-preserving map between spaces of at most
    ``n`` points and over every order-preserving table except for the space
    sizes in :data:`SAMPLED_PAIRS`, which get ``samples`` random tables each.
    The separating witness is checked on every precondition-satisfying pair
    ``(w, a)`` with ``a`` a {0,1}-valued lsc function, for maps with (II)
    between spaces of at most ``witness_points`` points.
    """
    res = SuiteResult(f"(II) <=> openness, <= {n} points")
    wit = SuiteResult("separating witness")
    by_size = {k: posets_up_to_iso(k) for k in range(1, n + 1)}
    for a in by_size:
        for b in by_size:
            for Y in by_size[a]:
                for Z in by_size[b]:
                    small = len(Y) <= witness_points and len(Z) <= witness_points
                    for basis in basis_assignments(Y, Z):
                        res.checked += 1
                        tab = table_from_basis(Y, basis)
                        lhs, proj, gen, faces, _ = _openness_core(Y, Z, tab)
                        if lhs != (proj and gen):
                            res.fail(("basis", Y, Z, basis))
                        if lhs and small:
                            _witness_checks(wit, Y, Z, basis, tab, faces)
    rng = random.Random(seed)
    sampled = 0
    for a in by_size:
        for b in by_size:
            pairs = [(Y, Z) for Y in by_size[a] for Z in by_size[b]]
            if (a, b) in SAMPLED_PAIRS:
                for k in range(samples):
                    Y, Z = pairs[k % len(pairs)]
                    tab = random_monotone_table(Y, Z, rng)
                    res.checked += 1
                    sampled += 1
                    if not openness_agrees(Y, Z, tab):
                        res.fail(("table", Y, Z, tab))
                continue
            for Y, Z in pairs:
                for tab in monotone_tables(Y, Z):
                    res.checked += 1
                    if not openness_agrees(Y, Z, tab):
                        res.fail(("table", Y, Z, tab))
    # the library entry point on a slice, so its own cross-checks run too
    for Y in spaces_up_to(min(n, 3)):
        for Z in spaces_up_to(min(n, 2)):
            for tab in monotone_tables(Y, Z):
                try:
                    check_II_via_openness(TableMap(Y, Z, tab))
                except FrametopError as exc:
                    res.fail((repr(exc), Y, Z, tab))
    notes = [f"{sampled} of them sampled at sizes {list(SAMPLED_PAIRS)}"] if sampled else []
    notes.append(f"{wit.checked} separating witnesses")
    res.note = "; ".join(notes)
    res.checked += wit.checked
    res.failures.extend(wit.failures)
    return res


def _witness_checks(res: SuiteResult, Y, Z, basis, tab, faces, api: bool = False):
    """All precondition-satisfying ``(w, a)`` for one map with (II)."""
    psi = FrameMap(Y, Z, dict(zip(Y.points, basis))) if api else None
    family = FaceFamily(Y, Z, faces)
    for w in Y.open_masks():
        for supp in Z.open_masks():
            if supp & ~tab[w] == 0:
                continue
            res.checked += 1
            a = ScalarFunction.indicator(Z, supp)
            try:
                t = separating_witness(psi, w, a) if api else dirac_witness(Y, Z, faces, w, supp)
            except FrametopError as exc:
                res.fail((repr(exc), Y, Z, basis, w, supp))
                continue
            if t is None:
                res.fail(("no witness", Y, Z, basis, w, supp))
                continue
            ta = t.apply(a)
            if not any(ta[q] for q in bits(Y.full & ~w)):
                res.fail(("T a vanishes off w", Y, Z, basis, w, supp))
            if not t.respects_faces(family):
                res.fail(("T charges outside the faces", Y, Z, basis, w, supp))
            # equivariance: f supported in Psi(U) gives T f supported in U
            for u, img in tab.items():
                if any(v and img >> z & 1 and not u >> y & 1 for (y, z), v in t.entries.items()):
                    res.fail(("T not equivariant", Y, Z, basis, w, supp))
                    break


@_timed
def separating_witness_suite(n: int = 4, api_points: int = 3) -> SuiteResult:
    """Every map with (II) at ``<= n`` points, every open ``w`` and every
    {0,1}-valued lsc ``a`` (an indicator of an open set) not vanishing off
    ``Psi(w)``.  Up to ``api_points`` the validating public entry point is
    used; beyond it the Dirac-row search it delegates to.
    """
    res = SuiteResult(f"separating witness, <= {n} points")
    spaces = spaces_up_to(n)
    for Y in spaces:
        for Z in spaces:
            api = len(Y) <= api_points and len(Z) <= api_points
            for basis in basis_assignments(Y, Z):
                tab = table_from_basis(Y, basis)
                lhs, _, _, faces, _ = _openness_core(Y, Z, tab)
                if lhs:
                    _witness_checks(res, Y, Z, basis, tab, faces, api)
    return res


def random_lsc_function(rng: random.Random, space: FinitePoset, denominator: int = 12) -> ScalarFunction:
    """Monotone rational values built along a random linear extension."""
    order = sorted(range(len(space)), key=lambda i: (bin(space.down[i]).count("1"), rng.random()))
    vals = [Fraction(0)] * len(space)
    for i in order:
        lo = max((vals[j] for j in bits(space.down[i] & ~(1 << i))), default=Fraction(0))
        vals[i] = lo + Fraction(rng.randint(0, 2 * denominator), denominator) * rng.choice((0, 1))
    return ScalarFunction(space, tuple(vals))


@_timed
def dini_suite(samples: int = 1000, max_points: int = 8, seed: int = 0) -> SuiteResult:
    res = SuiteResult(f"Dini criteria, {samples} random lsc functions <= {max_points} points")
    rng = random.Random(seed)
    for _ in range(samples):
        S = random_poset(rng.randint(1, max_points), rng)
        g = random_lsc_function(rng, S)
        res.checked += 1
        if not is_lsc(g):
            res.fail(("generator produced a non-lsc function", g))
            continue
        try:
            report = dini_report(g)
        except FrametopError as exc:
            res.fail((repr(exc), g))
            continue
        if any(w is not None for w in report.values()):
            res.fail(("criterion failed", g, report))
        if g.sup(0) != 0:
            res.fail(("sup of the empty set is not 0", g))
    return res


@_timed
def spaces_suite(n: int = 5) -> SuiteResult:
    """T0, sobriety and lattice closure on every space up to ``n`` points."""
    from .poset import is_sober

    res = SuiteResult(f"spaces <= {n} points")
    for X in spaces_up_to(n):
        res.checked += 1
        if len(set(X.down)) != len(X):
            res.fail(("closures of points not distinct", X))
        if not is_sober(X):
            res.fail(("not sober", X))
        opens = set(X.open_masks())
        if any(u | v not in opens or u & v not in opens for u in opens for v in opens):
            res.fail(("open sets not a lattice", X))
        theta = retraction(Sublattice(X, opens))
        if not compose(theta, identity_map(X)).same_as(identity_map(X)):
            res.fail(("retraction onto latO is not the identity", X))
    return res
