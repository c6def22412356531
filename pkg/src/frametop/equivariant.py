"""Finite commutative model of equivariant positive maps.

``Y`` is the base space and ``Z`` plays the role of ``Prim A``.  Quasi-states
are represented only by their extreme points, i.e. points of ``Z`` (plus the
zero functional), so a face ``K_y`` is determined by the closed set
``F_y = Z minus Psi(Y minus cl{y})`` of points it may charge.  A positive
contraction ``A -> C(Y)`` becomes a nonnegative ``Y x Z`` matrix with row
sums at most one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .dini import ScalarFunction, as_fraction, is_lsc
from .errors import ConsistencyError, ContractViolation, TheoremViolation
from .frames import LatticeMap, _as_mask, check_properties
from .poset import FinitePoset, bits
from .pointmaps import lsc_criterion_witness


@dataclass(frozen=True)
class FaceFamily:
    base: FinitePoset
    state_space: FinitePoset
    supports: tuple[int, ...]

    def face(self, label: str) -> frozenset[str]:
        return self.state_space.labels_of(self.supports[self.base.index_of(label)])

    @property
    def base_is_hausdorff(self) -> bool:
        return all(d == 1 << i for i, d in enumerate(self.base.down))


def _require_order_preserving(psi: LatticeMap):
    report = check_properties(psi)
    if not report.III0:
        raise ContractViolation(
            f"map is not order preserving; witness {report.counterexamples['III0']}"
        )
    return report


def faces_from_psi(psi: LatticeMap) -> FaceFamily:
    """``F_y = Z minus Psi(Y minus cl{y})`` for each point ``y`` of ``Y``."""
    _require_order_preserving(psi)
    Y, Z = psi.source, psi.target
    supports = tuple(Z.full & ~psi.image_mask(Y.full & ~Y.down[i]) for i in range(len(Y)))
    return FaceFamily(Y, Z, supports)


@dataclass
class OpennessReport:
    """``lhs`` is property (II); ``rhs`` is the relation-side condition.

    The relation side has two parts: the first projection of
    ``R = {(y, z) : z in F_y}`` is open (lower semicontinuity of ``y -> F_y``),
    and every closed-set value ``Z minus Psi(Y minus F)`` is generated by the
    faces over ``F``.  In a finite space the projection is open for every
    order-preserving map, so the generation part carries the content.
    """

    lhs: bool
    projection_open: bool
    generated: bool
    witness: object = None
    faces: FaceFamily | None = field(default=None, repr=False)

    @property
    def rhs(self) -> bool:
        return self.projection_open and self.generated

    @property
    def agreement(self) -> bool:
        return self.lhs == self.rhs


def _openness_core(Y: FinitePoset, Z: FinitePoset, tab: Mapping[int, int]):
    """Both sides on a raw monotone table ``open mask -> open mask``.

    Returns ``(lhs, projection_open, generated, supports, witness)``.  Intersections
    of up-sets are up-sets, so the interior on the source side is a no-op.
    """
    opens = Y.open_masks()
    lhs = tab[Y.full] == Z.full
    if lhs:
        for k, u in enumerate(opens):
            tu = tab[u]
            for v in opens[k + 1:]:
                if tab[u & v] != Z.interior_mask(tu & tab[v]):
                    lhs = False
                    break
            if not lhs:
                break
    supports = tuple(Z.full & ~tab[Y.full & ~Y.down[i]] for i in range(len(Y)))
    bad = lsc_criterion_witness(Y, supports, Z.down_closure)
    witness = None if bad is None else ("V, y", Y.sorted_labels(bad[0]), Y.points[bad[1]])
    generated = True
    for u in opens:
        spanned = 0
        for y in bits(Y.full & ~u):
            spanned |= supports[y]
        if Z.full & ~tab[u] != Z.down_closure(spanned):
            generated = False
            witness = witness or ("closed set not generated by its faces", Y.sorted_labels(Y.full & ~u))
            break
    return lhs, bad is None, generated, supports, witness


def openness_agrees(Y: FinitePoset, Z: FinitePoset, tab: Mapping[int, int]) -> bool:
    """Fast agreement test for sweeps; the table must be monotone."""
    lhs, proj, gen, _, _ = _openness_core(Y, Z, tab)
    return lhs == (proj and gen)


def check_II_via_openness(psi: LatticeMap) -> OpennessReport:
    report = _require_order_preserving(psi)
    Y, Z = psi.source, psi.target
    lhs, proj, gen, supports, witness = _openness_core(Y, Z, psi.mask_table)
    if lhs != report.II:
        raise ConsistencyError(f"(II) evaluated two ways gives {lhs} and {report.II}")
    out = OpennessReport(lhs, proj, gen, witness, FaceFamily(Y, Z, supports))
    if not out.agreement:
        raise TheoremViolation(
            f"(II) is {out.lhs} but the relation side is {out.rhs}",
            witness or report.counterexamples.get("II"),
        )
    return out


@dataclass(frozen=True)
class PositiveMatrixMap:
    """Nonnegative ``Y x Z`` matrix with row sums at most one; zero entries omitted."""

    rows: FinitePoset
    cols: FinitePoset
    entries: Mapping[tuple[int, int], Fraction]

    def __post_init__(self):
        sums = [Fraction(0)] * len(self.rows)
        for (y, z), v in self.entries.items():
            if v < 0:
                raise ContractViolation("matrix entries must be nonnegative")
            sums[y] += v
        if any(s > 1 for s in sums):
            raise ContractViolation("row sums must not exceed one")

    def apply(self, f: ScalarFunction) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * len(self.rows)
        for (y, z), v in self.entries.items():
            out[y] += v * f.values[z]
        return tuple(out)

    def respects_faces(self, faces: FaceFamily) -> bool:
        return all(faces.supports[y] >> z & 1 for (y, z), v in self.entries.items() if v)

    def is_equivariant(self, psi: LatticeMap) -> bool:
        """``f`` supported in ``Psi(U)`` implies ``T f`` supported in ``U``, for all open ``U``."""
        for u, img in psi.mask_table.items():
            for (y, z), v in self.entries.items():
                if v and img >> z & 1 and not u >> y & 1:
                    return False
        return True

    def table(self) -> list[tuple[str, str, Fraction]]:
        return [
            (self.rows.points[y], self.cols.points[z], v)
            for (y, z), v in sorted(self.entries.items())
        ]


def separating_witness(psi: LatticeMap, w, a: ScalarFunction) -> PositiveMatrixMap:
    """Positive contraction ``T`` respecting the faces with ``T a`` nonzero off ``w``.

    Needs (II) and ``a`` not vanishing outside ``Psi(w)``.  Picks the first
    ``q`` outside ``w`` whose face meets the support of ``a`` and places a
    Dirac row at ``q``.
    """
    Y, Z = psi.source, psi.target
    wmask = _as_mask(Y, w)
    if not Y.is_up(wmask):
        raise ContractViolation(f"{Y.sorted_labels(wmask)} is not open")
    if a.space != Z:
        raise ContractViolation("function must live on the target space")
    if not is_lsc(a):
        raise ContractViolation("function must be lower semicontinuous")
    report = check_properties(psi)
    if not (report.III0 and report.II):
        raise ContractViolation("separating_witness needs an order-preserving map with (II)")
    supp = a.support()
    if supp & ~psi.image_mask(wmask) == 0:
        raise ContractViolation("function lies in the ideal of Psi(w); nothing to separate")
    t = dirac_witness(Y, Z, faces_from_psi(psi).supports, wmask, supp)
    if t is None:
        raise TheoremViolation(
            "no separating point although (II) holds", (Y.sorted_labels(wmask), a.values)
        )
    assert t.apply(a)[next(iter(t.entries))[0]] > 0
    return t


def dirac_witness(Y: FinitePoset, Z: FinitePoset, supports, wmask: int, supp: int):
    """Dirac row at the first ``q`` outside ``w`` whose face meets ``supp``; None if there is none."""
    for q in bits(Y.full & ~wmask):
        hit = supports[q] & supp
        if hit:
            return PositiveMatrixMap(Y, Z, {(q, next(bits(hit))): Fraction(1)})
    return None


def grid_states(n: int, denominator: int) -> list[tuple[Fraction, ...]]:
    """Sub-probability vectors on ``n`` atoms with entries in ``(1/denominator) Z``."""
    out = []
    for combo in itertools.product(range(denominator + 1), repeat=n):
        if sum(combo) <= denominator:
            out.append(tuple(Fraction(c, denominator) for c in combo))
    return out


def hull_projection_open(faces: FaceFamily, denominator: int = 2) -> bool:
    """Openness of the projection for the relation of all grid states supported in the faces.

    A set of states is closed when it contains every state whose support
    lies in the closure of the union of its members' supports.
    """
    Z = faces.state_space
    states = grid_states(len(Z), denominator)
    supp = [sum(1 << i for i, c in enumerate(s) if c) for s in states]
    fibres = []
    for f in faces.supports:
        fibres.append(sum(1 << k for k, s in enumerate(supp) if s & ~f == 0))

    def closure(mask):
        reach = 0
        for k in bits(mask):
            reach |= supp[k]
        reach = Z.down_closure(reach)
        return sum(1 << k for k, s in enumerate(supp) if s & ~reach == 0)

    return lsc_criterion_witness(faces.base, fibres, closure) is None


def extreme_projection_open(faces: FaceFamily) -> bool:
    return lsc_criterion_witness(faces.base, faces.supports, faces.state_space.down_closure) is None


def ideal_function(space: FinitePoset, values: Mapping[str, object], name: str = "") -> ScalarFunction:
    """Convenience constructor for the function ``a`` on ``Z``."""
    return ScalarFunction(space, tuple(as_fraction(values.get(p, 0)) for p in space.points), name)
