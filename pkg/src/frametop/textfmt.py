"""Reader and writer for the line-oriented text format.

Every declaration is a block that opens with a keyword line and closes with
``end``.  Blank lines and lines whose first non-blank character is ``#`` are
ignored.  The full grammar is in ``docs/grammar.ebnf``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .dini import ScalarFunction
from .errors import FrametopError, InputError, ParseError
from .frames import FrameMap, LatticeMap, Sublattice, TableMap
from .poset import LABEL_RE, FinitePoset
from .pointmaps import PointMap

RATIONAL_RE = re.compile(r"^-?\d+(/[1-9]\d*)?$")

# keyword -> (number of header arguments after NAME, allowed body keyword)
BLOCKS = {
    "space": (0, "point|leq"),
    "frame": (2, "img"),
    "table": (2, "at"),
    "sublattice": (1, "member"),
    "map": (2, "send"),
    "func": (1, "val"),
}


@dataclass
class _Block:
    kind: str
    name: str
    args: tuple[str, ...]
    line: int
    source: str | None
    body: list[tuple[int, list[str]]] = field(default_factory=list)


@dataclass
class Document:
    """Named declarations, each kind kept in input order."""

    spaces: dict[str, FinitePoset] = field(default_factory=dict)
    maps: dict[str, PointMap] = field(default_factory=dict)
    frames: dict[str, LatticeMap] = field(default_factory=dict)
    sublattices: dict[str, Sublattice] = field(default_factory=dict)
    functions: dict[str, ScalarFunction] = field(default_factory=dict)

    def names(self) -> list[str]:
        out = []
        for group in (self.spaces, self.maps, self.frames, self.sublattices, self.functions):
            out.extend(group)
        return out


def _check_label(tok: str, line: int, source):
    if not LABEL_RE.match(tok):
        raise ParseError(f"bad label {tok!r}; labels match [A-Za-z0-9_]+", line, source)
    return tok


def _split_colon(toks: list[str], line: int, source) -> tuple[list[str], list[str]]:
    if ":" not in toks:
        raise ParseError("expected ':' separating the two point lists", line, source)
    k = toks.index(":")
    return toks[:k], toks[k + 1:]


def _blocks(text: str, source: str | None) -> list[_Block]:
    blocks = []
    cur: _Block | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        # a bare colon may be glued to a label, e.g. "img a: b c"
        toks = line.replace(":", " : ").split()
        head = toks[0]
        if cur is None:
            if head not in BLOCKS:
                raise ParseError(f"expected a declaration, got {head!r}", lineno, source)
            nargs = BLOCKS[head][0]
            if len(toks) != 2 + nargs:
                raise ParseError(
                    f"'{head}' takes a name and {nargs} space name(s)", lineno, source
                )
            for t in toks[1:]:
                _check_label(t, lineno, source)
            cur = _Block(head, toks[1], tuple(toks[2:]), lineno, source)
            continue
        if head == "end":
            if len(toks) != 1:
                raise ParseError("'end' takes no arguments", lineno, source)
            blocks.append(cur)
            cur = None
            continue
        allowed = BLOCKS[cur.kind][1].split("|")
        if head not in allowed:
            raise ParseError(
                f"'{head}' is not allowed inside '{cur.kind}' (expected {' or '.join(allowed)} or end)",
                lineno,
                source,
            )
        cur.body.append((lineno, toks))
    if cur is not None:
        raise ParseError(f"'{cur.kind} {cur.name}' is missing 'end'", cur.line, source)
    return blocks


def _build_space(b: _Block) -> FinitePoset:
    points, pairs = [], []
    for lineno, toks in b.body:
        if toks[0] == "point":
            if len(toks) != 2:
                raise ParseError("'point' takes one label", lineno, b.source)
            lab = _check_label(toks[1], lineno, b.source)
            if lab in points:
                raise ParseError(f"point {lab!r} declared twice", lineno, b.source)
            points.append(lab)
        else:
            if len(toks) != 3:
                raise ParseError("'leq' takes two labels", lineno, b.source)
            for t in toks[1:]:
                if t not in points:
                    raise ParseError(f"unknown point {t!r} in 'leq'", lineno, b.source)
            pairs.append((toks[1], toks[2]))
    return FinitePoset.from_relation(points, pairs, b.name)


def _labels(space: FinitePoset, toks: list[str], lineno: int, source) -> int:
    for t in toks:
        _check_label(t, lineno, source)
        if t not in space.index:
            raise ParseError(f"unknown point {t!r} of space {space.name!r}", lineno, source)
    return space.mask_of(toks)


def _build_frame(b: _Block, X: FinitePoset, P: FinitePoset) -> FrameMap:
    images = {}
    for lineno, toks in b.body:
        left, right = _split_colon(toks[1:], lineno, b.source)
        if len(left) != 1:
            raise ParseError("'img' takes exactly one source point before ':'", lineno, b.source)
        a = left[0]
        _labels(X, left, lineno, b.source)
        if a in images:
            raise ParseError(f"image of {a!r} given twice", lineno, b.source)
        m = _labels(P, right, lineno, b.source)
        if not P.is_up(m):
            raise ParseError(
                f"image of {a!r} {P.sorted_labels(m)} is not up-closed in {P.name!r}",
                lineno,
                b.source,
            )
        images[a] = m
    return FrameMap(X, P, images, b.name)


def _build_table(b: _Block, X: FinitePoset, P: FinitePoset) -> TableMap:
    tab = {}
    for lineno, toks in b.body:
        left, right = _split_colon(toks[1:], lineno, b.source)
        u = _labels(X, left, lineno, b.source)
        if u in tab:
            raise ParseError(f"value at {X.sorted_labels(u)} given twice", lineno, b.source)
        tab[u] = _labels(P, right, lineno, b.source)
    return TableMap(X, P, tab, b.name)


def _build_sublattice(b: _Block, P: FinitePoset) -> Sublattice:
    members = []
    for lineno, toks in b.body:
        members.append(_labels(P, toks[1:], lineno, b.source))
    return Sublattice(P, members, b.name)


def _build_map(b: _Block, P: FinitePoset, X: FinitePoset) -> PointMap:
    assign = {}
    for lineno, toks in b.body:
        if len(toks) != 3:
            raise ParseError("'send' takes a source point and a target point", lineno, b.source)
        _labels(P, [toks[1]], lineno, b.source)
        _labels(X, [toks[2]], lineno, b.source)
        if toks[1] in assign:
            raise ParseError(f"point {toks[1]!r} sent twice", lineno, b.source)
        assign[toks[1]] = toks[2]
    return PointMap(P, X, assign, b.name)


def _build_function(b: _Block, S: FinitePoset) -> ScalarFunction:
    values = {}
    for lineno, toks in b.body:
        if len(toks) != 3:
            raise ParseError("'val' takes a point and a rational", lineno, b.source)
        _labels(S, [toks[1]], lineno, b.source)
        if not RATIONAL_RE.match(toks[2]):
            raise ParseError(f"{toks[2]!r} is not an integer or a/b rational", lineno, b.source)
        if toks[1] in values:
            raise ParseError(f"value at {toks[1]!r} given twice", lineno, b.source)
        values[toks[1]] = Fraction(toks[2])
    return ScalarFunction.of(S, values, b.name)


def parse_text(text: str, source: str | None = None) -> Document:
    return _assemble(_blocks(text, source))


def parse_files(paths: Iterable[str | Path]) -> Document:
    """Parse several files into one document; names are shared across files."""
    blocks = []
    for p in paths:
        try:
            text = Path(p).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read {p}: {exc}") from exc
        blocks.extend(_blocks(text, str(p)))
    return _assemble(blocks)


def _assemble(blocks: list[_Block]) -> Document:
    doc = Document()
    seen: dict[str, _Block] = {}
    for b in blocks:
        if b.name in seen:
            first = seen[b.name]
            raise ParseError(
                f"name {b.name!r} already declared at {first.source or '<text>'}:{first.line}",
                b.line,
                b.source,
            )
        seen[b.name] = b

    def space(name: str, b: _Block) -> FinitePoset:
        if name not in doc.spaces:
            raise ParseError(f"'{b.kind} {b.name}' refers to unknown space {name!r}", b.line, b.source)
        return doc.spaces[name]

    # spaces first so that declarations may refer forward, also across files
    for b in blocks:
        if b.kind == "space":
            doc.spaces[b.name] = _wrap(_build_space, b)
    for b in blocks:
        if b.kind == "frame":
            doc.frames[b.name] = _wrap(_build_frame, b, space(b.args[0], b), space(b.args[1], b))
        elif b.kind == "table":
            doc.frames[b.name] = _wrap(_build_table, b, space(b.args[0], b), space(b.args[1], b))
        elif b.kind == "sublattice":
            doc.sublattices[b.name] = _wrap(_build_sublattice, b, space(b.args[0], b))
        elif b.kind == "map":
            doc.maps[b.name] = _wrap(_build_map, b, space(b.args[0], b), space(b.args[1], b))
        elif b.kind == "func":
            doc.functions[b.name] = _wrap(_build_function, b, space(b.args[0], b))
    return doc


def _wrap(builder, b: _Block, *args):
    try:
        return builder(b, *args)
    except ParseError:
        raise
    except FrametopError as exc:
        raise ParseError(f"in '{b.kind} {b.name}': {exc}", b.line, b.source) from exc


# writers


def write_space(space: FinitePoset, name: str | None = None) -> str:
    lines = [f"space {name or space.name}"]
    lines += [f"point {p}" for p in space.points]
    lines += [f"leq {space.points[a]} {space.points[b]}" for a, b in space.cover_pairs()]
    lines.append("end")
    return "\n".join(lines) + "\n"


def _pts(space: FinitePoset, mask: int) -> str:
    return " ".join(space.sorted_labels(mask))


def write_frame(psi: LatticeMap, name: str | None = None) -> str:
    """Basis form for :class:`FrameMap`, ``table`` form otherwise."""
    X, P = psi.source, psi.target
    name = name or psi.name or "Psi"
    if isinstance(psi, FrameMap):
        lines = [f"frame {name} {X.name} {P.name}"]
        for a, m in zip(X.points, psi.basis):
            lines.append(f"img {a} : {_pts(P, m)}".rstrip())
    else:
        lines = [f"table {name} {X.name} {P.name}"]
        for u in X.open_masks():
            lines.append(f"at {_pts(X, u)} : {_pts(P, psi.image_mask(u))}".replace("  ", " ").rstrip())
    lines.append("end")
    return "\n".join(lines) + "\n"


def write_sublattice(omega: Sublattice, name: str | None = None) -> str:
    lines = [f"sublattice {name or omega.name or 'Omega'} {omega.space.name}"]
    lines += [f"member {_pts(omega.space, m)}".rstrip() for m in omega.masks]
    lines.append("end")
    return "\n".join(lines) + "\n"


def write_map(pi: PointMap, name: str | None = None) -> str:
    lines = [f"map {name or pi.name or 'pi'} {pi.source.name} {pi.target.name}"]
    lines += [f"send {p} {x}" for p, x in pi.assignment.items()]
    lines.append("end")
    return "\n".join(lines) + "\n"


def write_function(g: ScalarFunction, name: str | None = None) -> str:
    lines = [f"func {name or g.name or 'g'} {g.space.name}"]
    lines += [f"val {p} {v}" for p, v in zip(g.space.points, g.values)]
    lines.append("end")
    return "\n".join(lines) + "\n"


def write_document(doc: Document) -> str:
    parts = [write_space(s) for s in doc.spaces.values()]
    parts += [write_frame(f) for f in doc.frames.values()]
    parts += [write_sublattice(o) for o in doc.sublattices.values()]
    parts += [write_map(m) for m in doc.maps.values()]
    parts += [write_function(g) for g in doc.functions.values()]
    return "\n".join(parts)

