import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from frametop.cli import VERBS, run

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
SIERP = str(SAMPLES / "sierpinski.ft")
A3C3 = str(SAMPLES / "a3c3.ft")
DINI = str(SAMPLES / "dini.ft")
EQUI = str(SAMPLES / "equivariant.ft")

JSON_KEYS = {"schema", "verb", "subject", "flags", "witnesses", "elapsed_ms"}


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def json_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def strip_time(objs):
    for o in objs:
        o.pop("elapsed_ms")
    return objs


@pytest.mark.parametrize(
    "argv, code",
    [
        (("check-space", SIERP), 0),
        (("check-frame", SIERP), 0),
        (("check-map", A3C3), 0),
        (("induce-pi", SIERP), 0),
        (("induce-psi", SIERP), 0),
        (("synthesize", SIERP), 0),
        (("dini", DINI), 1),
        (("dini", DINI, "--name", "g"), 0),
        (("equivariant", EQUI), 1),
        (("equivariant", EQUI, "--name", "Psi"), 0),
        (("check-frame", EQUI, "--name", "Bad"), 1),
        (("selftest", "--max-points", "2"), 0),
    ],
)
def test_exit_codes(argv, code):
    assert call(*argv)[0] == code


@pytest.mark.parametrize(
    "argv",
    [
        ("frobnicate", SIERP),
        ("check-space",),
        ("check-space", "no/such/file.ft"),
        ("check-space", SIERP, "--name", "nope"),
        ("check-space", SIERP, "--max-points", "1"),
        ("check-space", SIERP, "--jobs", "0"),
        ("dini", SIERP),
        ("selftest", "--max-points", "5"),
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert call(*argv)[0] == 2
    assert capsys.readouterr().err


def test_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.ft"
    bad.write_text("space S\npoint a\nleq a b\nend\n")
    assert call("check-space", str(bad))[0] == 2
    err = capsys.readouterr().err
    assert "bad.ft:3" in err and "unknown point" in err


def test_json_schema_every_verb():
    cases = [
        ("check-space", SIERP),
        ("check-frame", SIERP),
        ("check-map", A3C3),
        ("induce-pi", SIERP),
        ("induce-psi", SIERP),
        ("synthesize", SIERP),
        ("dini", DINI),
        ("equivariant", EQUI),
        ("selftest", "--max-points", "2"),
    ]
    seen = set()
    for argv in cases:
        _, out = call(*argv, "--json")
        objs = json_lines(out)
        assert objs
        for o in objs:
            assert JSON_KEYS <= set(o)
            assert set(o) - JSON_KEYS <= {"output"}
            assert o["schema"] == 1 and o["verb"] == argv[0]
            assert all(isinstance(v, bool) for v in o["flags"].values())
            assert isinstance(o["elapsed_ms"], (int, float))
        seen.add(argv[0])
    assert seen == set(VERBS)


def test_json_witnesses_on_failure():
    code, out = call("equivariant", EQUI, "--name", "Bad", "--json")
    assert code == 1
    (o,) = json_lines(out)
    assert o["subject"] == "Bad"
    assert o["flags"]["II"] is False
    assert o["witnesses"]


def test_check_map_reports_pseudo_open_not_open():
    code, out = call("check-map", A3C3)
    assert code == 0
    assert "pseudo-open: true (4/4 methods), open: false" in out
    _, js = call("check-map", A3C3, "--json")
    (o,) = json_lines(js)
    assert o["flags"]["pseudo_open"] and not o["flags"]["open"]


def test_induce_outputs_reparse():
    from frametop.textfmt import parse_text

    _, out = call("induce-pi", SIERP)
    doc = parse_text(open(SIERP).read() + "\n" + out.replace("map pi_Psi", "map pi2"))
    assert doc.maps["pi2"].assignment == {"p": "0", "q": "1"}
    _, out = call("induce-psi", SIERP)
    doc = parse_text(open(SIERP).read() + "\n" + out)
    assert doc.frames["Psi_pi"].mask_table == doc.frames["Psi"].mask_table


def test_synthesize_lines():
    _, out = call("synthesize", SIERP)
    assert "prim ≅ X: PASS" in out
    assert "Fix(Theta) = Omega: PASS" in out


def test_determinism_modulo_elapsed():
    for argv in (("check-frame", SIERP, EQUI), ("selftest", "--max-points", "2", "--seed", "3")):
        a = strip_time(json_lines(call(*argv, "--json")[1]))
        b = strip_time(json_lines(call(*argv, "--json")[1]))
        assert a == b


def test_jobs_matches_serial():
    a = strip_time(json_lines(call("check-frame", SIERP, EQUI, "--json")[1]))
    b = strip_time(json_lines(call("check-frame", SIERP, EQUI, "--json", "--jobs", "2")[1]))
    assert a == b
    a = strip_time(json_lines(call("selftest", "--max-points", "2", "--json")[1]))
    b = strip_time(json_lines(call("selftest", "--max-points", "2", "--json", "--jobs", "2")[1]))
    assert a == b


def test_dot_output(tmp_path):
    dot = tmp_path / "out.dot"
    assert call("synthesize", SIERP, "--dot", str(dot))[0] == 0
    text = dot.read_text()
    assert text.count("digraph") == 4
    assert '"0" -> "1";' in text
    assert call("check-space", SIERP, "--dot", str(tmp_path / "no" / "x.dot"))[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "frametop", "check-space", SIERP, "--json"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json_lines(proc.stdout)[0]["subject"] == "S"
