"""Lower semicontinuous and Dini functions on finite T0-spaces.

Values are exact :class:`fractions.Fraction` objects, so every sup/inf
comparison below is an equality test, not a tolerance test.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .errors import ConsistencyError, ContractViolation
from .poset import FinitePoset, bits, chain, unique_labels

CRITERIA = ("iv", "v", "vi")
# the restricted search of criterion (v) enumerates candidates only up to this many
V_SEARCH_BUDGET = 4096


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise ContractViolation("use exact rationals (int, Fraction or 'a/b' strings), not floats")
    return Fraction(value)


@dataclass(frozen=True)
class ScalarFunction:
    """A function ``space -> [0, inf)`` with rational values, stored in point order."""

    space: FinitePoset
    values: tuple[Fraction, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.values) != len(self.space):
            raise ContractViolation("one value per point is required")
        for v in self.values:
            if v < 0:
                raise ContractViolation(f"function {self.name!r} takes the negative value {v}")

    @classmethod
    def of(cls, space: FinitePoset, values: Mapping[str, object], name: str = "") -> "ScalarFunction":
        missing = [p for p in space.points if p not in values]
        if missing:
            raise ContractViolation(f"function {name!r}: no value at {missing[0]!r}")
        extra = set(values) - set(space.points)
        if extra:
            raise ContractViolation(f"function {name!r}: values at unknown points {sorted(extra)}")
        return cls(space, tuple(as_fraction(values[p]) for p in space.points), name)

    @classmethod
    def indicator(cls, space: FinitePoset, mask: int, name: str = "") -> "ScalarFunction":
        return cls(space, tuple(Fraction(mask >> i & 1) for i in range(len(space))), name)

    def __call__(self, label: str) -> Fraction:
        return self.values[self.space.index_of(label)]

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.space.points, self.values))

    def sup(self, mask: int) -> Fraction:
        """Supremum over a set of points, with ``sup of the empty set = 0``."""
        return max((self.values[i] for i in bits(mask)), default=Fraction(0))

    def support(self) -> int:
        return sum(1 << i for i, v in enumerate(self.values) if v != 0)

    def superlevel(self, t, strict: bool = True) -> int:
        t = as_fraction(t)
        return sum(
            1 << i for i, v in enumerate(self.values) if (v > t if strict else v >= t)
        )

    def map(self, fn: Callable[[Fraction], Fraction], name: str = "") -> "ScalarFunction":
        return ScalarFunction(self.space, tuple(as_fraction(fn(v)) for v in self.values), name)


def pointwise_max(g: ScalarFunction, h: ScalarFunction) -> ScalarFunction:
    if g.space != h.space:
        raise ContractViolation("functions live on different spaces")
    return ScalarFunction(g.space, tuple(max(a, b) for a, b in zip(g.values, h.values)))


def is_lsc(g: ScalarFunction) -> bool:
    """Lower semicontinuity.

    On a finite space every strict superlevel set ``{g > t}`` is open iff
    ``g`` is monotone: ``x <= y`` implies ``g(x) <= g(y)``.
    """
    sp = g.space
    return all(
        g.values[a] <= g.values[b] for b, d in enumerate(sp.down) for a in bits(d)
    )


def superlevel_sets_open(g: ScalarFunction) -> bool:
    """Every strict superlevel set is an up-set (independent of :func:`is_lsc`)."""
    levels = sorted(set(g.values) | {Fraction(0)})
    return all(g.space.is_up(g.superlevel(t)) for t in levels)


def _closed_masks(space: FinitePoset):
    return [space.full & ~u for u in space.open_masks()]


def _criterion_iv(g: ScalarFunction, chain_length: int = 2):
    """``sup g(n F_k) = inf_k sup g(F_k)`` on decreasing chains of closed sets.

    A decreasing sequence of closed subsets of a finite space is eventually
    constant, so chains of the given length (repeats allowed) stand in for
    sequences.  Returns a failing chain or None.
    """
    closed = _closed_masks(g.space)
    for seq in itertools.product(closed, repeat=chain_length):
        if any(seq[k + 1] & ~seq[k] for k in range(chain_length - 1)):
            continue
        inter = g.space.full
        for f in seq:
            inter &= f
        if g.sup(inter) != min(g.sup(f) for f in seq):
            return seq
    return None


def _criterion_v(g: ScalarFunction):
    """Restricted search for an increasing sequence ``f_n`` of lsc functions
    with pointwise supremum ``g`` that fails to converge uniformly.

    Candidates take values in ``{0} u values(g)``.  That set of candidates is
    finite, so an increasing sequence in it is eventually constant and its
    supremum is its final term; a non-uniform witness would need a candidate
    other than ``g`` whose supremum is ``g``.  The search enumerates the
    candidates when there are at most ``V_SEARCH_BUDGET`` of them and also
    runs the truncation sequence ``min(g, v_k)`` through the value levels.
    Returns a witness or None.
    """
    sp = g.space
    levels = sorted(set(g.values) | {Fraction(0)})
    # truncation sequence: lsc, increasing, sup = g
    errors = []
    for v in levels:
        f = g.map(lambda t, v=v: min(t, v))
        if not is_lsc(f):
            return ("truncation not lsc", v)
        errors.append(max(a - b for a, b in zip(g.values, f.values)))
    if errors[-1] != 0:
        return ("truncation sequence does not reach g", errors)
    n = len(sp)
    if len(levels) ** n <= V_SEARCH_BUDGET:
        allowed = [[v for v in levels if v <= g.values[i]] for i in range(n)]
        for vals in itertools.product(*allowed):
            f = ScalarFunction(sp, tuple(vals))
            if not is_lsc(f):
                continue
            # an increasing sequence whose eventual value is f has supremum f
            # and uniform distance max(g - f) from g after it stabilizes
            supremum = f.values
            distance = max(a - b for a, b in zip(g.values, f.values))
            if supremum == g.values and distance != 0:
                return ("non-uniform sequence", vals)
    return None


def _criterion_vi(g: ScalarFunction):
    """``{g >= gamma}`` quasi-compact for all ``gamma > 0`` and ``g`` bounded.

    A finite set is quasi-compact: any open cover has the finite subcover
    given by picking one member per point.  This is carried out explicitly on
    the cover by minimal neighbourhoods.
    """
    sp = g.space
    for gamma in sorted(set(g.values) - {Fraction(0)}):
        s = g.superlevel(gamma, strict=False)
        cover = [sp.up[i] for i in range(len(sp))]
        sub = []
        for i in bits(s):
            sub.append(next(u for u in cover if u >> i & 1))
        union = 0
        for u in sub:
            union |= u
        if s & ~union:
            return ("no finite subcover", gamma)
    if not g.values:
        return None
    bound = max(g.values)
    if any(v > bound for v in g.values):
        return ("unbounded", bound)
    return None


_CHECKS = {"iv": _criterion_iv, "v": _criterion_v, "vi": _criterion_vi}


def dini_report(g: ScalarFunction) -> dict[str, object]:
    """Witness (or None) for each criterion."""
    if not is_lsc(g):
        raise ContractViolation(f"function {g.name!r} is not lower semicontinuous")
    return {c: _CHECKS[c](g) for c in CRITERIA}


def is_dini(g: ScalarFunction, criterion: str = "all") -> bool:
    if criterion == "all":
        report = dini_report(g)
        verdicts = {c: w is None for c, w in report.items()}
        if len(set(verdicts.values())) > 1:
            raise ConsistencyError(f"Dini criteria disagree: {report}")
        return all(verdicts.values())
    if criterion not in _CHECKS:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {CRITERIA + ('all',)}")
    if not is_lsc(g):
        raise ContractViolation(f"function {g.name!r} is not lower semicontinuous")
    return _CHECKS[criterion](g) is None


def is_dini_space(space: FinitePoset) -> bool:
    """Supports of Dini functions form a base of the topology.

    The indicator of each minimal neighbourhood is checked to be a Dini
    function; those supports are then checked to generate every open set.
    """
    supports = []
    for i in range(len(space)):
        g = ScalarFunction.indicator(space, space.up[i])
        if not (is_lsc(g) and is_dini(g)):
            return False
        supports.append(g.support())
    for u in space.open_masks():
        union = 0
        for s in supports:
            if s & ~u == 0:
                union |= s
        if union != u:
            return False
    return True


def lsc_chain(n: int) -> FinitePoset:
    """Finite model of ``(0,1]`` with the lower topology: an ``n``-point chain."""
    if n < 1:
        raise ContractViolation("lsc_chain needs at least one point")
    return chain(n, f"L{n}")


def product(x: FinitePoset, y: FinitePoset, name: str = "") -> FinitePoset:
    """Product space; for finite spaces its specialization order is componentwise."""
    pairs = [(i, j) for i in range(len(x)) for j in range(len(y))]
    labels = unique_labels([f"{x.points[i]}_{y.points[j]}" for i, j in pairs])
    rel = [
        (labels[a], labels[b])
        for a, (i1, j1) in enumerate(pairs)
        for b, (i2, j2) in enumerate(pairs)
        if x.down[i2] >> i1 & 1 and y.down[j2] >> j1 & 1 and a != b
    ]
    return FinitePoset.from_relation(labels, rel, name or f"{x.name}x{y.name}")


def nonclosure_counterexamples(space: FinitePoset, grid) -> list[tuple[str, ScalarFunction, ScalarFunction]]:
    """Search lsc functions valued in ``grid`` for pairs whose midpoint, product
    or minimum is not a Dini function.  Only reports; never asserts."""
    grid = [as_fraction(v) for v in grid]
    fns = []
    for vals in itertools.product(grid, repeat=len(space)):
        f = ScalarFunction(space, tuple(vals))
        if is_lsc(f):
            fns.append(f)
    ops = {
        "convex": lambda a, b: (a + b) / 2,
        "product": lambda a, b: a * b,
        "min": min,
    }
    found = []
    for g, h in itertools.combinations(fns, 2):
        for op, fn in ops.items():
            r = ScalarFunction(space, tuple(fn(a, b) for a, b in zip(g.values, h.values)))
            if not is_lsc(r) or not is_dini(r):
                found.append((op, g, h))
    return found
