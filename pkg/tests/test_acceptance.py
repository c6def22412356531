"""Acceptance criteria, one test each, at full size.

Every test prints a single ``PASS``/``FAIL`` line (shown even without ``-s``)
and then asserts on it.  Run alone with::

    pytest tests/test_acceptance.py -v
    python3 tests/test_acceptance.py
"""

import sys
import time

import pytest

from frametop import suites
from frametop.dini import lsc_chain
from frametop.pointmaps import PointMap, is_pseudo_epi, pseudo_open_report
from frametop.poset import antichain

LINES = []


def report(capsys, label, ok, detail, elapsed, limit=None):
    timing = f"{elapsed:.1f}s" + (f" (limit {limit}s)" if limit else "")
    within = limit is None or elapsed < limit
    line = f"{'PASS' if ok and within else 'FAIL'} [{label}] {detail}; {timing}"
    LINES.append(line)
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok and within


def suite_case(capsys, label, res, limit=None, extra_ok=True, extra=""):
    detail = f"{res.checked} checked, {len(res.failures)} failures"
    if res.note:
        detail += f" ({res.note})"
    if extra:
        detail += f"; {extra}"
    ok = report(capsys, label, res.ok and extra_ok, detail, res.elapsed, limit)
    assert ok, (res.failures[:3], extra)


@pytest.mark.acceptance
def test_roundtrips(capsys):
    res = suites.roundtrip_suite(4)
    suite_case(capsys, "Psi<->pi round trips, <= 4 points", res, 60)


@pytest.mark.acceptance
def test_pseudo_open_agreement(capsys):
    res = suites.pseudo_open_suite(4, surjective_only=True)
    suite_case(capsys, "four-way pseudo-open agreement, surjections <= 4 points", res, 120)


@pytest.mark.acceptance
def test_main_theorem(capsys):
    res = suites.main_theorem_suite(n=4, random_count=1000, random_points=7, seed=0)
    suite_case(capsys, "main theorem: prim = X and Fix(Theta) = Omega", res, 120)


@pytest.mark.acceptance
def test_phi_laws(capsys):
    res = suites.phi_suite(n=4, random_count=1000, random_points=7, seed=0)
    suite_case(capsys, "Phi laws (a)-(e), PhiPsiPhi = Phi, PsiPhiPsi = Psi", res)


@pytest.mark.acceptance
def test_birkhoff(capsys):
    res = suites.birkhoff_suite(samples=500, max_points=7, seed=0)
    suite_case(capsys, "Birkhoff round trip, 500 spaces <= 7 points", res, 30)


@pytest.mark.acceptance
def test_II_openness(capsys):
    t0 = time.perf_counter()
    res = suites.openness_suite(n=4, samples=20000, seed=0, witness_points=4)
    api = suites.separating_witness_suite(n=3, api_points=3)
    res.elapsed = time.perf_counter() - t0
    extra = f"public separating_witness on {api.checked} pairs <= 3 points, {len(api.failures)} failures"
    suite_case(capsys, "(II) <=> openness with separating witnesses", res, 120, api.ok, extra)


@pytest.mark.acceptance
def test_lsc_chain_analog(capsys):
    t0 = time.perf_counter()
    rows = []
    ok = True
    for n in range(2, 7):
        A = antichain(n)
        L = lsc_chain(n)
        pi = PointMap(A, L, {str(k): str(k) for k in range(n)}, f"id{n}")
        rep = pseudo_open_report(pi)
        got = (rep.agree and rep.value, is_pseudo_epi(pi), pi.is_open_map())
        rows.append(f"n={n}:{''.join('TF'[not b] for b in got)}")
        ok = ok and got == (True, True, False)
    detail = "pseudo-open, pseudo-epi, open = T T F expected; " + " ".join(rows)
    assert report(capsys, "finite lsc-interval analog, n = 2..6", ok, detail, time.perf_counter() - t0)


@pytest.mark.acceptance
def test_dini_tripwires(capsys):
    res = suites.dini_suite(samples=1000, max_points=8, seed=0)
    suite_case(capsys, "Dini criteria (iv), (v restricted), (vi) on 1000 lsc functions", res, 30)


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn(None)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
