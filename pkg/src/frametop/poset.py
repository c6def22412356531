"""Finite T0-spaces presented by their specialization order.

Convention used everywhere in the package: ``x <= y`` means that ``x`` lies in
the closure of ``{y}``.  Open sets are therefore up-sets and closed sets are
down-sets.  Subsets of a space are handled internally as integer bit masks
(bit ``i`` set means point index ``i`` is a member); the public functions take
and return labels.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import ContractViolation, InputError, ResourceError

DEFAULT_MAX_POINTS = 20
LABEL_RE = re.compile(r"^[A-Za-z0-9_]+$")


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def unique_labels(labels: Sequence[str]) -> list[str]:
    """Make generated labels distinct by suffixing repeats with ``_2``, ``_3``..."""
    seen: dict[str, int] = {}
    taken = set(labels)
    out = []
    for lab in labels:
        if lab in seen:
            k = seen[lab] + 1
            while f"{lab}_{k}" in taken:
                k += 1
            seen[lab] = k
            lab = f"{lab}_{k}"
            taken.add(lab)
        else:
            seen[lab] = 1
        out.append(lab)
    return out


@dataclass(frozen=True)
class FinitePoset:
    """A finite T0-space given by its specialization order.

    ``down[i]`` is the bit mask of the closure ``cl{i}`` (all ``j <= i``).
    Use :meth:`from_relation` to build one from generating pairs; the
    constructor itself expects an already closed, antisymmetric relation.
    """

    points: tuple[str, ...]
    down: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise InputError(f"duplicate point labels in space {self.name!r}")
        if len(self.down) != len(self.points):
            raise InputError("down masks must match the number of points")
        for i, d in enumerate(self.down):
            if not d >> i & 1:
                raise InputError(f"order is not reflexive at {self.points[i]!r}")
            for j in bits(d):
                if self.down[j] & ~d:
                    raise InputError("order is not transitive")
                if j != i and self.down[j] >> i & 1:
                    raise InputError(
                        f"cycle between {self.points[i]!r} and {self.points[j]!r} "
                        "violates the T0 axiom"
                    )

    @classmethod
    def from_relation(cls, points: Sequence[str], pairs: Iterable[tuple[str, str]] = (), name: str = ""):
        """Build a space from labels and pairs ``(a, b)`` meaning ``a <= b``.

        The relation is closed reflexively and transitively.  A cycle between
        distinct points raises :class:`InputError`.
        """
        points = tuple(points)
        index = {p: i for i, p in enumerate(points)}
        if len(index) != len(points):
            raise InputError(f"duplicate point labels in space {name!r}")
        n = len(points)
        down = [1 << i for i in range(n)]
        for a, b in pairs:
            for lab in (a, b):
                if lab not in index:
                    raise InputError(f"unknown point {lab!r} in space {name!r}")
            down[index[b]] |= 1 << index[a]
        # Warshall closure on bit rows
        for k in range(n):
            kb = 1 << k
            dk = down[k]
            for i in range(n):
                if down[i] & kb:
                    down[i] |= dk
        for i in range(n):
            for j in bits(down[i]):
                if j != i and down[j] >> i & 1:
                    raise InputError(
                        f"cycle between {points[i]!r} and {points[j]!r} violates the T0 axiom"
                    )
        return cls(points, tuple(down), name)

    # -- basic structure -------------------------------------------------

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __repr__(self):
        covers = ", ".join(f"{self.points[a]}<{self.points[b]}" for a, b in self.cover_pairs())
        label = f"{self.name}: " if self.name else ""
        return f"FinitePoset({label}[{', '.join(self.points)}]; {covers})"

    @cached_property
    def index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def up(self) -> tuple[int, ...]:
        """``up[i]`` is the minimal open neighbourhood of point ``i``."""
        n = len(self.points)
        up = [0] * n
        for i, d in enumerate(self.down):
            for j in bits(d):
                up[j] |= 1 << i
        return tuple(up)

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def leq(self, a: str, b: str) -> bool:
        return bool(self.down[self.index_of(b)] >> self.index_of(a) & 1)

    def index_of(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise InputError(f"unknown point {label!r} in space {self.name!r}") from None

    def mask_of(self, labels: Iterable[str]) -> int:
        m = 0
        for lab in labels:
            m |= 1 << self.index_of(lab)
        return m

    def labels_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.points[i] for i in bits(mask))

    def sorted_labels(self, mask: int) -> list[str]:
        return [self.points[i] for i in bits(mask)]

    def cover_pairs(self) -> list[tuple[int, int]]:
        """Pairs ``(a, b)`` with ``b`` covering ``a`` (Hasse diagram edges)."""
        out = []
        for b, d in enumerate(self.down):
            strict = d & ~(1 << b)
            for a in bits(strict):
                between = strict & self.up[a] & ~(1 << a)
                if not between:
                    out.append((a, b))
        return sorted(out)

    def relation_pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for b, d in enumerate(self.down) for a in bits(d)]

    # -- masks ------------------------------------------------------------

    def down_closure(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.down[i]
        return out

    def up_closure(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.up[i]
        return out

    def interior_mask(self, mask: int) -> int:
        """Largest up-set inside ``mask``."""
        cache = self._interiors
        out = cache.get(mask)
        if out is None:
            out = cache[mask] = self.full & ~self.down_closure(self.full & ~mask)
        return out

    @cached_property
    def _interiors(self) -> dict[int, int]:
        return {}

    def is_up(self, mask: int) -> bool:
        return self.up_closure(mask) == mask

    def is_down(self, mask: int) -> bool:
        return self.down_closure(mask) == mask

    def open_masks(self, max_points: int = DEFAULT_MAX_POINTS) -> tuple[int, ...]:
        """All up-sets sorted by (cardinality, bit pattern)."""
        if len(self.points) > max_points:
            raise ResourceError(
                f"open-set enumeration of {len(self.points)} points exceeds the bound max_points={max_points}"
            )
        return self._open_masks

    @cached_property
    def _open_masks(self) -> tuple[int, ...]:
        order = self._linear_extension()[::-1]  # maximal points first
        up = self.up
        found: list[int] = []

        def walk(k: int, cur: int):
            if k == len(order):
                found.append(cur)
                return
            i = order[k]
            walk(k + 1, cur)
            if up[i] & ~(1 << i) & ~cur == 0:
                walk(k + 1, cur | 1 << i)

        walk(0, 0)
        found.sort(key=lambda m: (popcount(m), m))
        return tuple(found)

    def _linear_extension(self) -> list[int]:
        return sorted(range(len(self.points)), key=lambda i: (popcount(self.down[i]), i))

    @cached_property
    def height(self) -> tuple[int, ...]:
        """Length of the longest chain ending at each point."""
        h = [0] * len(self.points)
        for i in self._linear_extension():
            for j in bits(self.down[i] & ~(1 << i)):
                h[i] = max(h[i], h[j] + 1)
        return tuple(h)

    @cached_property
    def depth(self) -> tuple[int, ...]:
        d = [0] * len(self.points)
        for i in reversed(self._linear_extension()):
            for j in bits(self.up[i] & ~(1 << i)):
                d[i] = max(d[i], d[j] + 1)
        return tuple(d)

    # -- derived spaces ---------------------------------------------------

    def subspace(self, mask: int, name: str = "") -> "FinitePoset":
        """Subspace topology; for finite spaces it is the restricted order."""
        keep = list(bits(mask))
        pos = {old: new for new, old in enumerate(keep)}
        down = tuple(
            sum(1 << pos[j] for j in bits(self.down[i] & mask)) for i in keep
        )
        return FinitePoset(tuple(self.points[i] for i in keep), down, name or self.name)

    def relabel(self, mapping: dict[str, str], name: str = "") -> "FinitePoset":
        return FinitePoset(tuple(mapping[p] for p in self.points), self.down, name or self.name)

    def permuted(self, perm: Sequence[int], name: str = "") -> "FinitePoset":
        """Same labels, with point ``i`` moved to position ``perm[i]``."""
        n = len(self.points)
        inv = [0] * n
        for i, j in enumerate(perm):
            inv[j] = i
        points = tuple(self.points[inv[j]] for j in range(n))
        down = tuple(sum(1 << perm[k] for k in bits(self.down[inv[j]])) for j in range(n))
        return FinitePoset(points, down, name or self.name)


@dataclass(frozen=True)
class OpenSet:
    """An up-closed set of points of ``space``."""

    space: FinitePoset
    mask: int

    def __post_init__(self):
        if self.mask & ~self.space.full:
            raise ContractViolation("open set mask has bits outside the space")
        if not self.space.is_up(self.mask):
            raise ContractViolation(
                f"{set(self.space.sorted_labels(self.mask))} is not open (not up-closed) "
                f"in space {self.space.name!r}"
            )

    @classmethod
    def of(cls, space: FinitePoset, labels: Iterable[str]) -> "OpenSet":
        return cls(space, space.mask_of(labels))

    @property
    def labels(self) -> frozenset[str]:
        return self.space.labels_of(self.mask)

    def __iter__(self):
        return iter(self.space.sorted_labels(self.mask))

    def __len__(self):
        return popcount(self.mask)

    def __contains__(self, label):
        return bool(self.mask >> self.space.index_of(label) & 1)

    def _same(self, other):
        if not isinstance(other, OpenSet) or other.space != self.space:
            raise ContractViolation("open sets live in different spaces")

    def __or__(self, other):
        self._same(other)
        return OpenSet(self.space, self.mask | other.mask)

    def __and__(self, other):
        self._same(other)
        return OpenSet(self.space, self.mask & other.mask)

    def __le__(self, other):
        self._same(other)
        return self.mask & ~other.mask == 0

    def __lt__(self, other):
        return self <= other and self.mask != other.mask

    def __repr__(self):
        return "{" + ",".join(self.space.sorted_labels(self.mask)) + "}"


class OpenLattice(Sequence):
    """The lattice of all open sets of a space, in enumeration order."""

    def __init__(self, space: FinitePoset, max_points: int = DEFAULT_MAX_POINTS):
        self.space = space
        self.masks = space.open_masks(max_points)
        self._pos = {m: k for k, m in enumerate(self.masks)}

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [OpenSet(self.space, m) for m in self.masks[k]]
        return OpenSet(self.space, self.masks[k])

    def __len__(self):
        return len(self.masks)

    def __contains__(self, item):
        return isinstance(item, OpenSet) and item.space == self.space and item.mask in self._pos

    def position(self, u: OpenSet) -> int:
        return self._pos[u.mask]

    def __repr__(self):
        return f"OpenLattice({self.space.name or 'space'}, {len(self)} opens)"


# -- point-set operations ----------------------------------------------------


def closure(space: FinitePoset, s: Iterable[str]) -> frozenset[str]:
    """Smallest closed (down-closed) set containing ``s``."""
    return space.labels_of(space.down_closure(space.mask_of(s)))


def interior(space: FinitePoset, s: Iterable[str]) -> OpenSet:
    """Largest open set contained in ``s``."""
    return OpenSet(space, space.interior_mask(space.mask_of(s)))


def open_sets(space: FinitePoset, max_points: int = DEFAULT_MAX_POINTS) -> OpenLattice:
    return OpenLattice(space, max_points)


def _closed_mask(space: FinitePoset, f: Iterable[str]) -> int:
    m = space.mask_of(f)
    if not space.is_down(m):
        raise ContractViolation(f"{sorted(f)} is not closed in space {space.name!r}")
    return m


def _prime_mask(space: FinitePoset, m: int) -> bool:
    # A nonempty closed set is the down-closure of its maximal elements.  With two or
    # more maxima, splitting them into two nonempty groups gives two proper closed
    # subsets whose union is m; with one maximum every proper closed subset misses it.
    if m == 0:
        return False
    maxima = [i for i in bits(m) if space.up[i] & m == 1 << i]
    return len(maxima) == 1


def is_prime_closed(space: FinitePoset, f: Iterable[str]) -> bool:
    """True iff the nonempty closed set ``f`` is not a union of two proper closed subsets."""
    m = _closed_mask(space, f)
    if m == 0:
        raise ContractViolation("prime test requires a nonempty closed set")
    return _prime_mask(space, m)


def prime_closed_sets(space: FinitePoset) -> list[frozenset[str]]:
    """All prime closed sets, in the order of their generic points' stored order.

    Candidates are the down-closures of all nonempty antichains; the result is
    filtered by :func:`is_prime_closed`, not assumed.
    """
    found = []
    seen = set()
    for m in _closed_masks(space):
        if m and m not in seen and _prime_mask(space, m):
            seen.add(m)
            found.append(m)
    found.sort(key=lambda m: max(i for i in bits(m) if space.up[i] & m == 1 << i))
    return [space.labels_of(m) for m in found]


def _closed_masks(space: FinitePoset) -> Iterator[int]:
    full = space.full
    for u in space.open_masks():
        yield full & ~u


def generic_point(space: FinitePoset, f: Iterable[str]) -> str:
    """The unique point whose closure is the prime closed set ``f``."""
    m = _closed_mask(space, f)
    if m == 0 or not _prime_mask(space, m):
        raise ContractViolation(f"{sorted(f)} is not a prime closed set")
    hits = [i for i in bits(m) if space.down[i] == m]
    if len(hits) != 1:
        raise ContractViolation(f"{sorted(f)} has {len(hits)} generic points")
    return space.points[hits[0]]


def is_sober(space: FinitePoset) -> bool:
    """Every prime closed set is the closure of exactly one point."""
    closures = {}
    for i, d in enumerate(space.down):
        closures.setdefault(d, []).append(i)
    for f in prime_closed_sets(space):
        if len(closures.get(space.mask_of(f), ())) != 1:
            return False
    return True


# -- constructors ------------------------------------------------------------


def chain(n: int, name: str = "") -> FinitePoset:
    """Total order ``0 <= 1 <= ... <= n-1``."""
    pts = [str(i) for i in range(n)]
    return FinitePoset.from_relation(pts, zip(pts, pts[1:]), name or f"C{n}")


def antichain(labels: int | Sequence[str], name: str = "") -> FinitePoset:
    if isinstance(labels, int):
        labels = [str(i) for i in range(labels)]
    return FinitePoset.from_relation(list(labels), (), name or f"A{len(labels)}")


def sierpinski(name: str = "S") -> FinitePoset:
    return FinitePoset.from_relation(["0", "1"], [("0", "1")], name)


def point_space(label: str = "pt", name: str = "pt") -> FinitePoset:
    return FinitePoset.from_relation([label], (), name)


def random_poset(n: int, rng: random.Random, density: float | None = None, name: str = "") -> FinitePoset:
    """Random poset on labels ``'0'..'n-1'`` from a random DAG, relabelled randomly."""
    if density is None:
        density = rng.random()
    pts = [str(i) for i in range(n)]
    pairs = [(pts[i], pts[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    space = FinitePoset.from_relation(pts, pairs, name or f"R{n}")
    perm = list(range(n))
    rng.shuffle(perm)
    return space.permuted(perm)


def naturally_labelled_posets(n: int) -> Iterator[FinitePoset]:
    """Every poset on ``n`` points whose order extends ``0 < 1 < ... < n-1`` numerically.

    Each isomorphism type appears at least once.
    """
    slots = [(i, j) for j in range(n) for i in range(j)]
    pts = tuple(str(i) for i in range(n))
    for choice in range(1 << len(slots)):
        down = [1 << i for i in range(n)]
        for k, (i, j) in enumerate(slots):
            if choice >> k & 1:
                down[j] |= 1 << i
        ok = True
        for j in range(n):
            for i in bits(down[j]):
                if down[i] & ~down[j]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield FinitePoset(pts, tuple(down), f"N{n}_{choice}")


def canonical_form(space: FinitePoset) -> tuple:
    """Isomorphism invariant that separates non-isomorphic posets.

    Minimum over invariant-respecting relabellings of the encoded relation.
    """
    n = len(space)
    if n == 0:
        return (0,)
    sig = _signatures(space)
    classes = sorted(set(sig))
    groups = [[i for i in range(n) if sig[i] == c] for c in classes]
    best = None
    for perms in itertools.product(*(itertools.permutations(g) for g in groups)):
        order = [i for p in perms for i in p]
        pos = {old: new for new, old in enumerate(order)}
        code = tuple(sum(1 << pos[j] for j in bits(space.down[i])) for i in order)
        if best is None or code < best:
            best = code
    return (n, tuple(classes), best)


def _signatures(space: FinitePoset) -> list[tuple]:
    return [
        (popcount(space.down[i]), popcount(space.up[i]), space.height[i], space.depth[i])
        for i in range(len(space))
    ]


def posets_up_to_iso(n: int) -> list[FinitePoset]:
    """One representative per isomorphism class of ``n``-point posets."""
    seen = {}
    for space in naturally_labelled_posets(n):
        seen.setdefault(canonical_form(space), space)
    reps = list(seen.values())
    for k, space in enumerate(reps):
        reps[k] = FinitePoset(space.points, space.down, f"P{n}_{k}")
    return reps


def find_isomorphism(a: FinitePoset, b: FinitePoset) -> dict[str, str] | None:
    """An order isomorphism ``a -> b`` as a label mapping, or None.

    Points are first split by (down-size, up-size, height, depth); the search
    only pairs points with equal signatures.
    """
    n = len(a)
    if n != len(b):
        return None
    sa, sb = _signatures(a), _signatures(b)
    if sorted(sa) != sorted(sb):
        return None
    order = sorted(range(n), key=lambda i: (sum(1 for s in sa if s == sa[i]), i))
    assign: dict[int, int] = {}
    used = 0

    def consistent(i, j):
        for i2, j2 in assign.items():
            if bool(a.down[i] >> i2 & 1) != bool(b.down[j] >> j2 & 1):
                return False
            if bool(a.down[i2] >> i & 1) != bool(b.down[j2] >> j & 1):
                return False
        return True

    def search(k):
        nonlocal used
        if k == n:
            return True
        i = order[k]
        for j in range(n):
            if used >> j & 1 or sb[j] != sa[i] or not consistent(i, j):
                continue
            assign[i] = j
            used |= 1 << j
            if search(k + 1):
                return True
            del assign[i]
            used &= ~(1 << j)
        return False

    if not search(0):
        return None
    return {a.points[i]: b.points[j] for i, j in assign.items()}


def is_homeomorphic(a: FinitePoset, b: FinitePoset) -> bool:
    """Finite T0-spaces are homeomorphic iff their specialization orders are isomorphic."""
    return find_isomorphism(a, b) is not None
