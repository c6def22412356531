"""Command-line front end.

    frametop VERB FILE... [--name NAME] [--json] [--dot FILE]
                          [--max-points N] [--seed N] [--jobs N]

Exit status: 0 when every checked property holds, 1 when one is false (the
report carries a witness), 2 for usage, parse and size errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import suites
from .dini import dini_report, is_dini_space, is_lsc
from .equivariant import check_II_via_openness, separating_witness
from .errors import ContractViolation, FrametopError, InputError, ResourceError
from .frames import FLAGS, LatticeMap, Sublattice, check_properties, quotient_space
from .poset import FinitePoset, OpenSet, bits, find_isomorphism, is_sober, prime_closed_sets
from .pointmaps import METHODS, induce_pi, induce_psi, is_pseudo_epi, pseudo_open_report
from .synthesis import crossed_product_ideals, spectrum
from .textfmt import Document, parse_files, write_frame, write_map, write_space

SCHEMA = 1
VERBS = (
    "check-space",
    "check-frame",
    "check-map",
    "induce-pi",
    "induce-psi",
    "synthesize",
    "dini",
    "equivariant",
    "selftest",
)
# which declarations each verb runs on
SUBJECT_KIND = {
    "check-space": "spaces",
    "check-frame": "frames",
    "check-map": "maps",
    "induce-pi": "frames",
    "induce-psi": "maps",
    "synthesize": "frames+sublattices",
    "dini": "functions",
    "equivariant": "frames",
}


@dataclass
class Report:
    verb: str
    subject: str
    flags: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, object] = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)
    output: str = ""
    failed: bool = False
    dot: list[str] = field(default_factory=list)
    elapsed_ms: float = 0.0

    def as_json(self) -> dict:
        out = {
            "schema": SCHEMA,
            "verb": self.verb,
            "subject": self.subject,
            "flags": self.flags,
            "witnesses": {k: _plain(v) for k, v in self.witnesses.items()},
            "elapsed_ms": round(self.elapsed_ms, 3),
        }
        if self.output:
            out["output"] = self.output
        return out


def _plain(v):
    """JSON-friendly copy of a witness."""
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (set, frozenset)):
        return sorted(_plain(x) for x in v)
    return repr(v)


def _fmt(space: FinitePoset, mask: int) -> str:
    return "{" + ",".join(space.sorted_labels(mask)) + "}"


def _yn(b: bool) -> str:
    return "true" if b else "false"


# -- DOT ---------------------------------------------------------------------


def _dot_graph(name: str, nodes: list[str], edges: list[tuple[str, str]]) -> str:
    lines = [f'digraph "{name}" {{', "  rankdir=BT;"]
    lines += [f'  "{n}";' for n in nodes]
    lines += [f'  "{a}" -> "{b}";' for a, b in edges]
    lines.append("}")
    return "\n".join(lines)


def hasse_dot(space: FinitePoset, name: str | None = None) -> str:
    edges = [(space.points[a], space.points[b]) for a, b in space.cover_pairs()]
    return _dot_graph(name or space.name, list(space.points), edges)


def lattice_dot(space: FinitePoset, masks, name: str) -> str:
    """Hasse diagram of a family of open sets ordered by inclusion."""
    masks = list(masks)
    label = {m: _fmt(space, m) for m in masks}
    edges = []
    for a in masks:
        for b in masks:
            if a != b and a & ~b == 0:
                if not any(c not in (a, b) and a & ~c == 0 and c & ~b == 0 for c in masks):
                    edges.append((label[a], label[b]))
    return _dot_graph(name, [label[m] for m in masks], edges)


# -- verbs -------------------------------------------------------------------


def _check_space(X: FinitePoset, args) -> Report:
    r = Report("check-space", X.name)
    opens = X.open_masks(args.max_points)
    sober = is_sober(X)
    t0 = len(set(X.down)) == len(X)
    r.flags = {"T0": t0, "sober": sober}
    covers = ", ".join(f"{X.points[a]} < {X.points[b]}" for a, b in X.cover_pairs()) or "(discrete)"
    r.lines = [
        f"space {X.name}: {len(X)} points, {len(opens)} open sets",
        f"  order: {covers}",
        f"  T0: {_yn(t0)}",
        f"  sober: {_yn(sober)}",
        "  prime closed sets: " + " ".join(_fmt(X, X.mask_of(f)) for f in prime_closed_sets(X)),
    ]
    r.failed = not (t0 and sober)
    r.dot = [hasse_dot(X)]
    return r


def _check_frame(psi: LatticeMap, args) -> Report:
    r = Report("check-frame", psi.name)
    rep = check_properties(psi)
    r.flags = dict(rep.flags)
    r.flags["lattice_monomorphism"] = rep.lattice_monomorphism
    r.flags["comes_from_point_map"] = rep.comes_from_point_map
    r.lines = [f"frame {psi.name}: {psi.source.name} -> {psi.target.name}"]
    for f in FLAGS:
        line = f"  ({f}): {_yn(rep.flags[f])}"
        if f in rep.counterexamples:
            fam = rep.counterexamples[f]
            shown = " ".join(repr(u) for u in fam) if fam else "empty family"
            line += f"  witness: {shown}"
            r.witnesses[f] = [repr(u) for u in fam]
        r.lines.append(line)
    r.lines.append(f"  (I)-(IV): {_yn(rep.lattice_monomorphism)}")
    r.lines.append(f"  inverse image of a point map: {_yn(rep.comes_from_point_map)}")
    r.failed = not all(rep.flags.values())
    r.dot = [hasse_dot(psi.source), hasse_dot(psi.target)]
    return r


def _check_map(pi, args) -> Report:
    r = Report("check-map", pi.name)
    rep = pseudo_open_report(pi)
    po = rep.value
    agree = sum(1 for v in rep.results.values() if v == po)
    pe = is_pseudo_epi(pi)
    is_open = pi.is_open_map()
    surj = pi.is_surjective()
    r.flags = {
        "pseudo_open": po,
        "pseudo_epi": pe,
        "open": is_open,
        "surjective": surj,
        "methods_agree": rep.agree,
    }
    for m in METHODS:
        r.flags[f"method:{m}"] = rep.results[m]
    r.witnesses = {m: _map_witness(pi, w) for m, w in rep.witnesses.items()}
    r.lines = [
        f"map {pi.name}: {pi.source.name} -> {pi.target.name}",
        f"  pseudo-open: {_yn(po)} ({agree}/{len(METHODS)} methods), open: {_yn(is_open)}",
        f"  pseudo-epi: {_yn(pe)}, surjective: {_yn(surj)}",
    ]
    if rep.corestricted:
        r.lines.append("  (not surjective: the characterizations ran on the corestriction)")
    for m, w in r.witnesses.items():
        r.lines.append(f"  witness [{m}]: {w}")
    mono = check_properties(induce_psi(pi)).lattice_monomorphism
    r.flags["induced_psi_I_IV"] = mono
    r.lines.append(f"  induced Psi satisfies (I)-(IV): {_yn(mono)}")
    r.failed = not (po and pe)
    r.dot = [hasse_dot(pi.source), hasse_dot(pi.target)]
    return r


def _map_witness(pi, w):
    """Readable form of a pseudo-open witness (masks become label sets)."""
    if isinstance(w, tuple) and w and isinstance(w[0], str):
        msg, rest = w[0], w[1]
        if isinstance(rest, tuple):
            return f"{msg}: V={_fmt(pi.source, rest[0])}, point {pi.source.points[rest[1]]}"
        return f"{msg}: {_fmt(pi.source, rest)}"
    if isinstance(w, int):
        return f"closed set {_fmt(pi.source, w)}"
    return repr(w)


def _induce_pi(psi: LatticeMap, args) -> Report:
    r = Report("induce-pi", psi.name)
    try:
        pi = induce_pi(psi)
    except ContractViolation as exc:
        r.flags = {"point_map": False}
        r.witnesses = {"precondition": str(exc)}
        r.lines = [f"frame {psi.name}: no point map ({exc})"]
        r.failed = True
        return r
    r.flags = {"point_map": True}
    r.output = write_map(pi, f"pi_{psi.name}")
    r.lines = [f"# induced by frame {psi.name}", r.output.rstrip()]
    return r


def _induce_psi(pi, args) -> Report:
    r = Report("induce-psi", pi.name)
    psi = induce_psi(pi)
    r.flags = {"frame": True}
    r.output = write_frame(psi, f"Psi_{pi.name}")
    r.lines = [f"# inverse images under map {pi.name}", r.output.rstrip()]
    return r


def _synthesize(obj, args) -> Report:
    if isinstance(obj, Sublattice):
        return _synthesize_sublattice(obj)
    psi = obj
    r = Report("synthesize", psi.name)
    try:
        out = crossed_product_ideals(psi)
    except ContractViolation as exc:
        r.flags = {"I-IV": False}
        r.witnesses = {"precondition": str(exc)}
        r.lines = [f"frame {psi.name}: {exc}"]
        r.failed = True
        return r
    X, P = psi.source, psi.target
    prim = out.prim
    r.flags = {"I-IV": True, "prim_homeomorphic_to_X": True, "theta_fixed_points_equal_omega": True}
    r.lines = [
        f"frame {psi.name}: {X.name} -> {P.name}",
        "  Omega: " + " ".join(_fmt(P, m) for m in out.omega.masks),
        "  prim:",
    ]
    r.lines += ["    " + line for line in write_space(prim).splitlines()]
    r.lines.append("  isomorphism prim -> X:")
    r.lines += [f"    {a} -> {b}" for a, b in out.homeomorphism.items()]
    r.lines.append("prim ≅ X: PASS")
    r.lines.append("Fix(Theta) = Omega: PASS")
    r.witnesses = {"homeomorphism": dict(out.homeomorphism)}
    r.dot = [
        hasse_dot(X, f"X {X.name}"),
        hasse_dot(P, f"P {P.name}"),
        hasse_dot(prim, "prim"),
        lattice_dot(P, out.omega.masks, "Omega"),
    ]
    return r


def _synthesize_sublattice(omega: Sublattice) -> Report:
    r = Report("synthesize", omega.name)
    P = omega.space
    X, _ = quotient_space(omega)
    spec = spectrum(omega)
    hom = find_isomorphism(spec.prim, X)
    ok = hom is not None
    r.flags = {"prim_homeomorphic_to_X": ok}
    r.lines = [
        f"sublattice {omega.name} of {P.name}",
        "  Omega: " + " ".join(_fmt(P, m) for m in omega.masks),
        "  quotient X:",
    ]
    r.lines += ["    " + line for line in write_space(X, "X").splitlines()]
    r.lines.append("  prim:")
    r.lines += ["    " + line for line in write_space(spec.prim).splitlines()]
    if ok:
        r.lines.append("  isomorphism prim -> X:")
        r.lines += [f"    {a} -> {b}" for a, b in hom.items()]
        r.witnesses = {"homeomorphism": dict(hom)}
    r.lines.append(f"prim ≅ X: {'PASS' if ok else 'FAIL'}")
    r.failed = not ok
    r.dot = [
        hasse_dot(X, "X"),
        hasse_dot(P, f"P {P.name}"),
        hasse_dot(spec.prim, "prim"),
        lattice_dot(P, omega.masks, "Omega"),
    ]
    return r


def _dini(g, args) -> Report:
    r = Report("dini", g.name)
    S = g.space
    lsc = is_lsc(g)
    r.flags = {"lsc": lsc}
    r.lines = [f"function {g.name} on {S.name}: " + ", ".join(f"{p}={v}" for p, v in zip(S.points, g.values))]
    r.lines.append(f"  lsc: {_yn(lsc)}")
    if not lsc:
        bad = next(
            (S.points[a], S.points[b])
            for b, d in enumerate(S.down)
            for a in bits(d)
            if g.values[a] > g.values[b]
        )
        n = g.name or "g"
        r.witnesses["lsc"] = f"{bad[0]} <= {bad[1]} but {n}({bad[0]}) > {n}({bad[1]})"
        r.lines.append(f"  witness: {r.witnesses['lsc']}")
        r.failed = True
        return r
    report = dini_report(g)
    for c, w in report.items():
        r.flags[f"criterion:{c}"] = w is None
        r.lines.append(f"  criterion ({c}): {_yn(w is None)}")
        if w is not None:
            r.witnesses[c] = w
    r.flags["dini"] = all(w is None for w in report.values())
    r.flags["dini_space"] = is_dini_space(S)
    r.lines.append(f"  Dini: {_yn(r.flags['dini'])}")
    r.lines.append(f"  {S.name} is a Dini space: {_yn(r.flags['dini_space'])}")
    r.failed = not r.flags["dini"]
    return r


def _equivariant(psi: LatticeMap, args, functions=()) -> Report:
    r = Report("equivariant", psi.name)
    Y, Z = psi.source, psi.target
    try:
        out = check_II_via_openness(psi)
    except ContractViolation as exc:
        r.flags = {"order_preserving": False}
        r.witnesses = {"precondition": str(exc)}
        r.lines = [f"frame {psi.name}: {exc}"]
        r.failed = True
        return r
    faces = out.faces
    r.flags = {
        "II": out.lhs,
        "projection_open": out.projection_open,
        "generated": out.generated,
        "agreement": out.agreement,
        "base_hausdorff": faces.base_is_hausdorff,
    }
    r.lines = [f"frame {psi.name}: {Y.name} -> {Z.name}", "  faces:"]
    width = max(len(p) for p in Y.points)
    for i, y in enumerate(Y.points):
        r.lines.append(f"    {y.ljust(width)} | {_fmt(Z, faces.supports[i])}")
    r.lines.append(
        f"  (II): {_yn(out.lhs)}, relation side: {_yn(out.rhs)} "
        f"(projection open: {_yn(out.projection_open)}, generated: {_yn(out.generated)})"
    )
    r.lines.append(f"  agreement: {'PASS' if out.agreement else 'FAIL'}")
    if faces.base_is_hausdorff:
        r.lines.append("  base is discrete (Hausdorff case)")
    if out.witness is not None:
        head, *rest = out.witness
        text = f"{head}: " + " ".join(x if isinstance(x, str) else "{" + ",".join(x) + "}" for x in rest)
        r.witnesses["relation"] = text
        r.lines.append(f"  witness: {text}")
    if out.lhs:
        for a in functions:
            if a.space != Z:
                continue
            for w in Y.open_masks():
                if a.support() & ~psi.image_mask(w) == 0:
                    continue
                t = separating_witness(psi, OpenSet(Y, w), a)
                key = f"T[{a.name}, w={_fmt(Y, w)}]"
                rows = [f"{y} {z} {v}" for y, z, v in t.table()]
                r.witnesses[key] = rows
                r.lines.append(f"  {key}:")
                r.lines += [f"    {row}" for row in rows]
    r.failed = not out.lhs
    r.dot = [hasse_dot(Y), hasse_dot(Z)]
    return r


SUITES = (
    ("spaces", lambda n, seed: suites.spaces_suite(max(n, 1))),
    ("roundtrip", lambda n, seed: suites.roundtrip_suite(n)),
    ("pseudo-open", lambda n, seed: suites.pseudo_open_suite(n)),
    ("main-theorem", lambda n, seed: suites.main_theorem_suite(n, 100, 7, seed)),
    ("phi-laws", lambda n, seed: suites.phi_suite(n, 100, 7, seed)),
    ("birkhoff", lambda n, seed: suites.birkhoff_suite(100, 7, seed)),
    ("openness", lambda n, seed: suites.openness_suite(n, 2000, seed, n)),
    ("dini", lambda n, seed: suites.dini_suite(200, 8, seed)),
)


def _run_suite(job):
    k, n, seed = job
    return SUITES[k][1](n, seed)


def _selftest(args) -> list[Report]:
    n = args.max_points if args.max_points_given else 3
    if n > 4:
        raise ResourceError("selftest supports --max-points up to 4")
    jobs = [(k, n, args.seed) for k in range(len(SUITES))]
    t0 = time.perf_counter()
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_run_suite, jobs))
    else:
        results = [_run_suite(j) for j in jobs]
    r = Report("selftest", f"suites <= {n} points, seed {args.seed}")
    for (name, _), res in zip(SUITES, results):
        r.flags[name] = res.ok
        if not res.ok:
            r.witnesses[name] = res.failures[0]
        r.lines.append(res.line())
    r.failed = not all(r.flags.values())
    r.elapsed_ms = (time.perf_counter() - t0) * 1000
    return [r]


HANDLERS = {
    "check-space": _check_space,
    "check-frame": _check_frame,
    "check-map": _check_map,
    "induce-pi": _induce_pi,
    "induce-psi": _induce_psi,
    "synthesize": _synthesize,
    "dini": _dini,
    "equivariant": _equivariant,
}


def _subjects(doc: Document, verb: str, name: str | None) -> list:
    kinds = SUBJECT_KIND[verb].split("+")
    found = []
    for kind in kinds:
        found += list(getattr(doc, kind).items())
    if name is not None:
        found = [(n, obj) for n, obj in found if n == name]
        if not found:
            raise InputError(f"no {' or '.join(k.rstrip('s') for k in kinds)} named {name!r}")
    elif not found:
        raise InputError(f"{verb} needs at least one {' or '.join(k.rstrip('s') for k in kinds)}")
    return [obj for _, obj in found]


# worker state for --jobs: each process parses the files once
_DOC: Document | None = None


def _init_worker(files):
    global _DOC
    _DOC = parse_files(files)


def _run_one(verb, obj, args, doc):
    t0 = time.perf_counter()
    if verb == "equivariant":
        r = _equivariant(obj, args, list(doc.functions.values()))
    else:
        r = HANDLERS[verb](obj, args)
    r.elapsed_ms = (time.perf_counter() - t0) * 1000
    return r


def _run_indexed(job):
    verb, k, args = job
    return _run_one(verb, _subjects(_DOC, verb, args.name)[k], args, _DOC)


def _check_sizes(doc: Document, bound: int):
    for s in doc.spaces.values():
        if len(s) > bound:
            raise ResourceError(
                f"space {s.name!r} has {len(s)} points, more than --max-points {bound}"
            )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="frametop",
        description="Checks on finite T0-spaces and maps between their open-set lattices.",
        epilog="exit status: 0 all checked properties hold, 1 a property is false, 2 usage or input error",
    )
    p.add_argument("verb", choices=VERBS, metavar="VERB", help=", ".join(VERBS))
    p.add_argument("files", nargs="*", metavar="FILE", help="input files in the text format")
    p.add_argument("--name", help="run only on the declaration with this name")
    p.add_argument("--json", action="store_true", help="one JSON object per subject (schema 1)")
    p.add_argument("--dot", metavar="FILE", help="write Hasse diagrams in DOT format")
    p.add_argument("--max-points", type=int, default=None, metavar="N",
                   help="size bound for spaces (default 20; selftest default 3)")
    p.add_argument("--seed", type=int, default=0, metavar="N", help="seed for randomized suites")
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
    return p


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.max_points_given = args.max_points is not None
    if args.max_points is None:
        args.max_points = 20
    if args.jobs < 1 or args.max_points < 1:
        print("error: --jobs and --max-points must be positive", file=sys.stderr)
        return 2
    try:
        if args.verb == "selftest":
            reports = _selftest(args)
        else:
            if not args.files:
                print(f"error: {args.verb} needs at least one input file", file=sys.stderr)
                return 2
            doc = parse_files(args.files)
            _check_sizes(doc, args.max_points)
            subjects = _subjects(doc, args.verb, args.name)
            if args.jobs > 1 and len(subjects) > 1:
                with ProcessPoolExecutor(args.jobs, initializer=_init_worker, initargs=(args.files,)) as ex:
                    reports = list(ex.map(_run_indexed, [(args.verb, k, args) for k in range(len(subjects))]))
            else:
                reports = [_run_one(args.verb, obj, args, doc) for obj in subjects]
    except (InputError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FrametopError as exc:
        # a contract failure on parsed input is a property failure of that input
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.json:
        for r in reports:
            print(json.dumps(r.as_json(), sort_keys=True, ensure_ascii=False), file=out)
    else:
        for k, r in enumerate(reports):
            if k:
                print(file=out)
            print("\n".join(r.lines), file=out)
    if args.dot:
        graphs = [g for r in reports for g in r.dot]
        try:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write("\n\n".join(graphs) + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.dot}: {exc}", file=sys.stderr)
            return 2
    return 1 if any(r.failed for r in reports) else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
