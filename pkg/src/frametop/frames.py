"""Maps between open-set lattices and the checks (I)-(IV) on them.

Two representations share one interface:

* :class:`FrameMap` stores a union-preserving map by its values on the
  minimal open neighbourhoods ``up(a)``; ``Psi(U)`` is the union of the basis
  images of the points of ``U``.
* :class:`TableMap` stores every value explicitly.  Pseudo-left-inverses and
  retractions are of this kind because they preserve meets, not unions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping

from .errors import ContractViolation
from .poset import DEFAULT_MAX_POINTS, FinitePoset, OpenSet, bits, popcount, unique_labels

FLAGS = ("I", "I0", "II", "II0", "III", "III0", "IV")


def _as_mask(space: FinitePoset, value) -> int:
    if isinstance(value, OpenSet):
        if value.space != space:
            raise ContractViolation(f"open set belongs to a different space than {space.name!r}")
        return value.mask
    if isinstance(value, int):
        return value
    return space.mask_of(value)


class LatticeMap:
    """Common behaviour of maps ``latO(source) -> latO(target)``."""

    source: FinitePoset
    target: FinitePoset
    name: str = ""

    def image_mask(self, umask: int) -> int:
        raise NotImplementedError

    @cached_property
    def mask_table(self) -> dict[int, int]:
        return {u: self.image_mask(u) for u in self.source.open_masks(self.max_points)}

    max_points = DEFAULT_MAX_POINTS

    def __call__(self, u) -> OpenSet:
        umask = _as_mask(self.source, u)
        if not self.source.is_up(umask):
            raise ContractViolation(
                f"{self.source.sorted_labels(umask)} is not open in {self.source.name!r}"
            )
        return OpenSet(self.target, self.image_mask(umask))

    eval = __call__

    def table(self) -> dict[OpenSet, OpenSet]:
        return {
            OpenSet(self.source, u): OpenSet(self.target, v) for u, v in self.mask_table.items()
        }

    def same_as(self, other: "LatticeMap") -> bool:
        return (
            self.source == other.source
            and self.target == other.target
            and self.mask_table == other.mask_table
        )

    def image(self) -> frozenset[int]:
        return frozenset(self.mask_table.values())


class FrameMap(LatticeMap):
    """Union-preserving map given by basis images ``B(a) = Psi(up(a))``.

    ``a <= b`` in the source forces ``B(b) <= B(a)``; this is checked here,
    together with openness of every image.
    """

    def __init__(self, source: FinitePoset, target: FinitePoset, images: Mapping, name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        basis = []
        for a in source.points:
            if a not in images:
                raise ContractViolation(f"frame {name!r}: no basis image for point {a!r}")
            m = _as_mask(target, images[a])
            if not target.is_up(m):
                raise ContractViolation(
                    f"frame {name!r}: image of {a!r} {target.sorted_labels(m)} is not open in "
                    f"{target.name!r}"
                )
            basis.append(m)
        extra = set(images) - set(source.points)
        if extra:
            raise ContractViolation(f"frame {name!r}: images given for unknown points {sorted(extra)}")
        for b, d in enumerate(source.down):
            for a in bits(d):
                if basis[b] & ~basis[a]:
                    raise ContractViolation(
                        f"frame {name!r}: {source.points[a]} <= {source.points[b]} but "
                        f"B({source.points[b]}) is not inside B({source.points[a]})"
                    )
        self.basis = tuple(basis)

    def image_mask(self, umask: int) -> int:
        out = 0
        for i in bits(umask):
            out |= self.basis[i]
        return out

    def basis_image(self, label: str) -> OpenSet:
        return OpenSet(self.target, self.basis[self.source.index_of(label)])

    def __eq__(self, other):
        if not isinstance(other, FrameMap):
            return NotImplemented
        return (self.source, self.target, self.basis) == (other.source, other.target, other.basis)

    def __hash__(self):
        return hash((self.source, self.target, self.basis))

    def __repr__(self):
        imgs = ", ".join(
            f"{a}->{OpenSet(self.target, m)!r}" for a, m in zip(self.source.points, self.basis)
        )
        return f"FrameMap({self.name or ''} {self.source.name}->{self.target.name}: {imgs})"


class TableMap(LatticeMap):
    """A map given by its value on every open set of the source."""

    def __init__(self, source: FinitePoset, target: FinitePoset, table: Mapping, name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        tab = {}
        for u, v in table.items():
            um, vm = _as_mask(source, u), _as_mask(target, v)
            if not source.is_up(um):
                raise ContractViolation(f"table {name!r}: {source.sorted_labels(um)} is not open")
            if not target.is_up(vm):
                raise ContractViolation(
                    f"table {name!r}: value {target.sorted_labels(vm)} is not open in {target.name!r}"
                )
            tab[um] = vm
        missing = [u for u in source.open_masks() if u not in tab]
        if missing:
            raise ContractViolation(
                f"table {name!r}: no value for open set {source.sorted_labels(missing[0])}"
            )
        self._tab = tab

    @classmethod
    def from_function(cls, source, target, fn: Callable[[int], int], name: str = "") -> "TableMap":
        """Tabulate ``fn`` on masks of all open sets of ``source``."""
        return cls(source, target, {u: fn(u) for u in source.open_masks()}, name)

    def image_mask(self, umask: int) -> int:
        return self._tab[umask]

    def as_frame_map(self) -> FrameMap:
        """Basis form, available only when the table preserves unions."""
        report = check_properties(self)
        if not report.III:
            raise ContractViolation(
                f"table {self.name!r} does not preserve unions; no basis form exists "
                f"(witness {report.counterexamples['III']})"
            )
        images = {a: self._tab[self.source.up[i]] for i, a in enumerate(self.source.points)}
        return FrameMap(self.source, self.target, images, self.name)

    def __eq__(self, other):
        if not isinstance(other, LatticeMap):
            return NotImplemented
        return self.same_as(other)

    __hash__ = None

    def __repr__(self):
        return f"TableMap({self.name or ''} {self.source.name}->{self.target.name}, {len(self._tab)} entries)"


def basis_assignments(source: FinitePoset, target: FinitePoset):
    """Every order-reversing ``point -> open mask`` tuple, i.e. every union-preserving map."""
    opens = target.open_masks()
    n = len(source)
    order = sorted(range(n), key=lambda i: (popcount(source.down[i]), i))
    below = [list(bits(source.down[i] & ~(1 << i))) for i in range(n)]
    assign = [0] * n

    def walk(k):
        if k == n:
            yield tuple(assign)
            return
        i = order[k]
        for v in opens:
            if all(v & ~assign[a] == 0 for a in below[i]):
                assign[i] = v
                yield from walk(k + 1)

    yield from walk(0)


def all_frame_maps(source: FinitePoset, target: FinitePoset):
    for basis in basis_assignments(source, target):
        yield FrameMap(source, target, dict(zip(source.points, basis)))


def monotone_tables(source: FinitePoset, target: FinitePoset):
    """Every order-preserving ``open mask -> open mask`` table, as dicts."""
    src = source.open_masks()
    dst = target.open_masks()
    # open sets are listed by size, so proper subsets come earlier
    subs = [[j for j in range(k) if src[j] & ~src[k] == 0] for k in range(len(src))]
    vals = [0] * len(src)

    def walk(k):
        if k == len(src):
            yield dict(zip(src, vals))
            return
        lo = 0
        for j in subs[k]:
            lo |= vals[j]
        for w in dst:
            if lo & ~w == 0:
                vals[k] = w
                yield from walk(k + 1)

    yield from walk(0)


def random_monotone_table(source: FinitePoset, target: FinitePoset, rng) -> dict[int, int]:
    """A random order-preserving table (not uniform over all of them)."""
    src = source.open_masks()
    dst = target.open_masks()
    tab: dict[int, int] = {}
    for u in src:
        lo = 0
        for v, w in tab.items():
            if v & ~u == 0:
                lo |= w
        tab[u] = rng.choice([w for w in dst if lo & ~w == 0])
    return tab


def identity_map(space: FinitePoset) -> FrameMap:
    return FrameMap(space, space, {a: space.up[i] for i, a in enumerate(space.points)}, "id")


def compose(outer: LatticeMap, inner: LatticeMap, name: str = "") -> TableMap:
    """``outer o inner`` as a table."""
    if inner.target != outer.source:
        raise ContractViolation("maps are not composable")
    return TableMap.from_function(
        inner.source, outer.target, lambda u: outer.image_mask(inner.image_mask(u)), name
    )


@dataclass
class PropertyReport:
    """Outcome of :func:`check_properties`.

    ``counterexamples[flag]`` holds the family of open sets witnessing a false
    flag: ``()`` stands for the empty family.
    """

    I: bool
    I0: bool
    II: bool
    II0: bool
    III: bool
    III0: bool
    IV: bool
    counterexamples: dict[str, tuple[OpenSet, ...]] = field(default_factory=dict)

    def __post_init__(self):
        assert not self.I or self.I0, "I must imply I0"
        assert not self.II or self.II0, "II must imply II0"
        assert not self.III or self.III0, "III must imply III0"

    @property
    def flags(self) -> dict[str, bool]:
        return {f: getattr(self, f) for f in FLAGS}

    @property
    def lattice_monomorphism(self) -> bool:
        """All of (I)-(IV)."""
        return self.I and self.II and self.III and self.IV

    @property
    def comes_from_point_map(self) -> bool:
        """(I0), (II0) and (III): exactly the inverse-image maps."""
        return self.I0 and self.II0 and self.III


def check_properties(psi: LatticeMap) -> PropertyReport:
    """Exhaustively decide (I), (I0), (II), (II0), (III), (III0) and (IV).

    Families of open sets are reduced to the empty family, singletons and
    pairs: in a finite space every family is finite, and for each property a
    statement about a finite family follows from the pairwise one by
    induction.  (III0) quantifies over upward directed families, whose union
    in a finite space is their largest member, so it amounts to monotonicity.
    """
    X, P = psi.source, psi.target
    tab = psi.mask_table
    opens = X.open_masks()
    top_x, top_p = X.full, P.full
    ex: dict[str, tuple] = {}

    def fam(*masks):
        return tuple(OpenSet(X, m) for m in masks)

    # (I0) / (I)
    if tab[0] != 0:
        ex["I0"] = ex["I"] = fam(0)
    elif tab[top_x] != top_p:
        ex["I0"] = ex["I"] = fam(top_x)
    else:
        for u in opens:
            if u != top_x and tab[u] == top_p:
                ex["I"] = fam(u)
                break

    # (II): empty family, then pairs
    if tab[top_x] != top_p:
        ex["II"] = ()
    for k, u in enumerate(opens):
        for v in opens[k:]:
            lhs = tab[X.interior_mask(u & v)]
            rhs = P.interior_mask(tab[u] & tab[v])
            if lhs != rhs:
                ex.setdefault("II", fam(u, v))
                ex.setdefault("II0", fam(u, v))
                break
        if "II0" in ex:
            break

    # (III): empty family, then pairs; (III0): comparable pairs
    if tab[0] != 0:
        ex["III"] = ()
    for k, u in enumerate(opens):
        for v in opens[k:]:
            if tab[u | v] != tab[u] | tab[v]:
                ex.setdefault("III", fam(u, v))
                if u & ~v == 0 or v & ~u == 0:
                    ex.setdefault("III0", fam(u, v))
    if "III0" not in ex:
        for u in opens:
            for v in opens:
                if u & ~v == 0 and tab[u] & ~tab[v]:
                    ex["III0"] = fam(u, v)
                    break
            if "III0" in ex:
                break

    # (IV)
    seen: dict[int, int] = {}
    for u in opens:
        v = tab[u]
        if v in seen:
            ex["IV"] = fam(seen[v], u)
            break
        seen[v] = u

    flags = {f: f not in ex for f in FLAGS}
    return PropertyReport(**flags, counterexamples=ex)


def family_holds(psi: LatticeMap, prop: str, family: Iterable) -> bool:
    """Evaluate (II) or (III) literally on one explicit family of open sets."""
    X, P = psi.source, psi.target
    masks = [_as_mask(X, u) for u in family]
    if prop == "II":
        inter_x, inter_p = X.full, P.full
        for m in masks:
            inter_x &= m
            inter_p &= psi.image_mask(m)
        return psi.image_mask(X.interior_mask(inter_x)) == P.interior_mask(inter_p)
    if prop == "III":
        union_x = union_p = 0
        for m in masks:
            union_x |= m
            union_p |= psi.image_mask(m)
        return psi.image_mask(union_x) == union_p
    raise ValueError(f"unknown property {prop!r}")


def pseudo_left_inverse(psi: LatticeMap) -> TableMap:
    """``Phi(V)``: union of all open ``U`` with ``Psi(U) <= V``.

    Requires (I0) and (III).  The result preserves interiors of
    intersections but in general not unions, so it is returned as a table.
    """
    report = check_properties(psi)
    for flag in ("I0", "III"):
        if not getattr(report, flag):
            raise ContractViolation(
                f"pseudo-left-inverse needs property ({flag}); witness "
                f"{report.counterexamples[flag]}"
            )
    X, P = psi.source, psi.target
    tab = psi.mask_table

    def phi(v: int) -> int:
        out = 0
        for u, img in tab.items():
            if img & ~v == 0:
                out |= u
        return out

    return TableMap.from_function(P, X, phi, f"Phi[{psi.name}]" if psi.name else "Phi")


class Sublattice:
    """Family of open sets of ``space`` containing both bounds and closed under
    unions and interiors of intersections.

    Missing bounds are adjoined with a warning; any other closure failure
    raises :class:`ContractViolation`.
    """

    def __init__(self, space: FinitePoset, members: Iterable, name: str = ""):
        self.space = space
        self.name = name
        masks = set()
        for m in members:
            mm = _as_mask(space, m)
            if not space.is_up(mm):
                raise ContractViolation(
                    f"sublattice {name!r}: member {space.sorted_labels(mm)} is not open"
                )
            masks.add(mm)
        for bound, label in ((0, "empty set"), (space.full, "whole space")):
            if bound not in masks:
                warnings.warn(f"sublattice {name!r}: adjoining missing {label}", stacklevel=2)
                masks.add(bound)
        ordered = sorted(masks, key=lambda m: (popcount(m), m))
        for k, u in enumerate(ordered):
            for v in ordered[k:]:
                if u | v not in masks:
                    raise ContractViolation(
                        f"sublattice {name!r}: union of {space.sorted_labels(u)} and "
                        f"{space.sorted_labels(v)} is missing"
                    )
                if space.interior_mask(u & v) not in masks:
                    raise ContractViolation(
                        f"sublattice {name!r}: interior of intersection of "
                        f"{space.sorted_labels(u)} and {space.sorted_labels(v)} is missing"
                    )
        self.masks = tuple(ordered)
        self._set = frozenset(ordered)

    def __iter__(self):
        return (OpenSet(self.space, m) for m in self.masks)

    def __len__(self):
        return len(self.masks)

    def __contains__(self, item):
        if isinstance(item, OpenSet):
            return item.space == self.space and item.mask in self._set
        return item in self._set

    def __eq__(self, other):
        if not isinstance(other, Sublattice):
            return NotImplemented
        return self.space == other.space and self._set == other._set

    def __hash__(self):
        return hash((self.space, self._set))

    def __repr__(self):
        return "Sublattice{" + ", ".join(repr(u) for u in self) + "}"

    def largest_inside(self, vmask: int) -> int:
        """Union of all members inside ``vmask``; itself a member by union-closure."""
        out = 0
        for m in self.masks:
            if m & ~vmask == 0:
                out |= m
        return out


def sublattice_closure(space: FinitePoset, seed: Iterable, name: str = "") -> Sublattice:
    """Smallest sublattice containing ``seed`` and both bounds."""
    current = {0, space.full}
    for s in seed:
        m = _as_mask(space, s)
        if not space.is_up(m):
            raise ContractViolation(f"seed member {space.sorted_labels(m)} is not open")
        current.add(m)
    while True:
        before = len(current)
        # union closure
        changed = True
        while changed:
            changed = False
            for u in list(current):
                for v in list(current):
                    if u | v not in current:
                        current.add(u | v)
                        changed = True
        # interior-of-intersection closure
        changed = True
        while changed:
            changed = False
            for u in list(current):
                for v in list(current):
                    w = space.interior_mask(u & v)
                    if w not in current:
                        current.add(w)
                        changed = True
        if len(current) == before:
            break
    return Sublattice(space, current, name)


def retraction(omega: Sublattice) -> TableMap:
    """``Theta(V)``: the largest member of ``omega`` contained in ``V``."""
    P = omega.space
    return TableMap.from_function(P, P, omega.largest_inside, f"Theta[{omega.name}]")


def quotient_space(omega: Sublattice, name: str = "") -> tuple[FinitePoset, FrameMap]:
    """Collapse points with the same closure in the coarser topology ``omega``.

    Returns the quotient space and the inverse-image map of the class
    projection, which maps ``latO(quotient)`` isomorphically onto ``omega``.
    Classes are labelled by joining their members' labels with ``_``.
    """
    P = omega.space
    keys = []
    for i in range(len(P)):
        key = 0
        for k, m in enumerate(omega.masks):
            if m >> i & 1:
                key |= 1 << k
        keys.append(key)
    classes: dict[int, int] = {}
    for i, key in enumerate(keys):
        classes[key] = classes.get(key, 0) | 1 << i
    class_keys = sorted(classes, key=lambda k: min(bits(classes[k])))
    labels = unique_labels(["_".join(P.sorted_labels(classes[k])) for k in class_keys])
    pairs = [
        (labels[a], labels[b])
        for a, ka in enumerate(class_keys)
        for b, kb in enumerate(class_keys)
        if a != b and ka & ~kb == 0
    ]
    X = FinitePoset.from_relation(labels, pairs, name or f"{P.name}/{omega.name or 'omega'}")
    images = {}
    for lab, key in zip(labels, class_keys):
        smallest = P.full
        for k in bits(key):
            smallest &= omega.masks[k]
        images[lab] = smallest
    return X, FrameMap(X, P, images, "Psi_quotient")
