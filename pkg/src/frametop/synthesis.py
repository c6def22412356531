"""Ideal-lattice shadow of the crossed-product construction.

A sublattice ``omega`` of ``latO(P)`` stands for the lattice of closed ideals
of the synthesized algebra.  Its spectrum is rebuilt Birkhoff-style from the
meet-irreducible members, and for a map ``Psi`` with (I)-(IV) the spectrum of
its image must come out homeomorphic to the source space.

For a finite distributive lattice the meet-irreducible elements are exactly
the prime ones (``W >= U n V`` implies ``W >= U`` or ``W >= V``), so they
give the hull-kernel prime spectrum: a member ``W`` corresponds to the open
set of primes not above it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ContractViolation, TheoremViolation
from .frames import LatticeMap, Sublattice, check_properties, retraction
from .poset import FinitePoset, OpenSet, bits, find_isomorphism, unique_labels


@dataclass
class SpectrumResult:
    """``prim`` together with the lattice isomorphism ``latO(prim) -> omega``.

    Both mappings are keyed by bit masks: ``iso_to_input[u]`` is the member of
    ``omega`` for the open set ``u`` of ``prim``; ``back`` is its inverse.
    """

    prim: FinitePoset
    omega: Sublattice
    iso_to_input: dict[int, int]
    back: dict[int, int]
    primes: tuple[int, ...]

    def member_for(self, u: OpenSet) -> OpenSet:
        return OpenSet(self.omega.space, self.iso_to_input[u.mask])

    def open_for(self, w: OpenSet) -> OpenSet:
        return OpenSet(self.prim, self.back[w.mask])


def meet_irreducibles(omega: Sublattice) -> list[int]:
    """Members ``W != top`` with ``W = U n V`` (U, V in omega) only if ``W in {U, V}``.

    Meets in ``omega`` are intersections, so ``W`` is meet-irreducible iff the
    intersection of all members strictly above it is not ``W`` itself.
    """
    members = omega.masks
    top = omega.space.full
    out = []
    for w in members:
        if w == top:
            continue
        above = top
        for v in members:
            if v != w and w & ~v == 0:
                above &= v
        if above != w:
            out.append(w)
    return out


def spectrum(omega: Sublattice) -> SpectrumResult:
    """Rebuild the space whose open-set lattice is ``omega``.

    Points are the meet-irreducible members, ordered by reverse inclusion, and
    labelled by the maximal points of their complements.  The isomorphism is
    verified (bijective, preserves unions and intersections) before return.
    """
    P = omega.space
    primes = meet_irreducibles(omega)
    names = []
    for m in primes:
        comp = P.full & ~m
        maxima = [i for i in bits(comp) if P.up[i] & comp == 1 << i]
        names.append("_".join(P.points[i] for i in maxima))
    labels = unique_labels(names)
    pairs = [
        (labels[a], labels[b])
        for a, ma in enumerate(primes)
        for b, mb in enumerate(primes)
        if a != b and mb & ~ma == 0  # ma contains mb
    ]
    prim = FinitePoset.from_relation(labels, pairs, f"Prim_{omega.name or P.name}")

    back = {}
    for w in omega.masks:
        u = 0
        for k, m in enumerate(primes):
            if w & ~m:
                u |= 1 << k
        back[w] = u
    iso = {u: w for w, u in back.items()}
    result = SpectrumResult(prim, omega, iso, back, tuple(primes))
    problem = verify_spectrum(result)
    if problem is not None:
        raise TheoremViolation("spectrum is not isomorphic to the input lattice", problem)
    return result


def verify_spectrum(result: SpectrumResult):
    """None if ``iso_to_input`` is a lattice isomorphism ``latO(prim) -> omega``, else a witness."""
    opens = set(result.prim.open_masks())
    if set(result.iso_to_input) != opens or len(result.back) != len(result.iso_to_input):
        return ("not a bijection", sorted(opens ^ set(result.iso_to_input)))
    if set(result.iso_to_input.values()) != set(result.omega.masks):
        return ("image differs from omega",)
    iso = result.iso_to_input
    for u in opens:
        for v in opens:
            if iso[u | v] != iso[u] | iso[v]:
                return ("union not preserved", u, v)
            if iso[u & v] != iso[u] & iso[v]:
                return ("intersection not preserved", u, v)
    return None


@dataclass
class SynthesisResult:
    omega: Sublattice
    spectrum: SpectrumResult
    homeomorphism: dict[str, str]
    fixed_points: frozenset[int]

    @property
    def prim(self) -> FinitePoset:
        return self.spectrum.prim


def crossed_product_ideals(psi: LatticeMap) -> SynthesisResult:
    """Lattice-level content of the main construction for a map with (I)-(IV).

    ``omega`` is the image of ``Psi``; the ideal lattice of the crossed product
    corresponds to ``omega`` and its primitive ideal space is ``spectrum(omega)``.
    Checks that ``omega`` is a sublattice, that the members fixed by the
    retraction onto ``omega`` are exactly ``omega``, and that the spectrum is
    homeomorphic to the source of ``Psi``.
    """
    report = check_properties(psi)
    if not report.lattice_monomorphism:
        failed = [f for f in ("I", "II", "III", "IV") if not getattr(report, f)]
        raise ContractViolation(
            f"crossed_product_ideals needs (I)-(IV); failed {failed}, witness "
            f"{report.counterexamples[failed[0]]}"
        )
    X, P = psi.source, psi.target
    try:
        omega = Sublattice(P, sorted(psi.image()), name=f"im_{psi.name or 'Psi'}")
    except ContractViolation as exc:
        raise TheoremViolation("image of Psi is not a sublattice", str(exc)) from exc
    theta = retraction(omega)
    fixed = frozenset(v for v, t in theta.mask_table.items() if t == v)
    if fixed != frozenset(omega.masks):
        raise TheoremViolation(
            "fixed points of the retraction differ from omega",
            sorted(fixed ^ frozenset(omega.masks)),
        )
    spec = spectrum(omega)
    hom = find_isomorphism(spec.prim, X)
    if hom is None:
        raise TheoremViolation("primitive ideal space is not homeomorphic to X", (spec.prim, X))
    return SynthesisResult(omega, spec, hom, fixed)


@dataclass
class RegularityReport:
    separates: bool
    sums: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.separates and self.sums


def regularity_check(
    omega: Sublattice | Mapping[str, Iterable[str] | OpenSet],
    space: FinitePoset | None = None,
    joins: Mapping[tuple[str, str], str] | None = None,
) -> RegularityReport:
    """Lattice form of the two regularity axioms for ``C`` inside ``E``.

    ``omega`` is either a :class:`Sublattice` or a hand-written table naming
    ideals of ``E`` and giving for each its trace ``J n C`` as an open set of
    ``space``.  Separation means distinct ideals have distinct traces.  Sum
    compatibility means the trace of ``I + J`` (the join, from ``joins`` or
    else the least table entry above both) is the union of the traces.
    """
    if isinstance(omega, Sublattice):
        space = omega.space
        table = {repr(OpenSet(space, m)): m for m in omega.masks}
    else:
        if space is None:
            raise ContractViolation("a hand-written table needs its space")
        table = {}
        for name, val in omega.items():
            m = val.mask if isinstance(val, OpenSet) else space.mask_of(val)
            if not space.is_up(m):
                raise ContractViolation(f"trace of {name!r} is not open")
            table[name] = m
    names = list(table)
    seen = {}
    for n in names:
        if table[n] in seen:
            return RegularityReport(False, True, (seen[table[n]], n))
        seen[table[n]] = n
    for k, a in enumerate(names):
        for b in names[k:]:
            if joins is not None and (a, b) in joins:
                j = joins[(a, b)]
            elif joins is not None and (b, a) in joins:
                j = joins[(b, a)]
            else:
                need = table[a] | table[b]
                above = [n for n in names if need & ~table[n] == 0]
                least = [n for n in above if all(table[n] & ~table[o] == 0 for o in above)]
                if not least:
                    return RegularityReport(True, False, (a, b))
                j = least[0]
            if table[j] != table[a] | table[b]:
                return RegularityReport(True, False, (a, b))
    return RegularityReport(True, True)
