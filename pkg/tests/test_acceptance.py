"""Acceptance criteria 1-10, one test each, with a PASS/FAIL line per criterion."""

import subprocess
import sys

import pytest

from rfkit.acceptance import CRITERIA, DEFAULT_SEED

RESULTS = {}


def _record(num, ok):
    RESULTS[num] = "PASS" if ok else "FAIL"
    return ok


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"{n}-{t}" for n, t, _ in CRITERIA])
def test_criterion(num, title, fn):
    try:
        rep = fn(DEFAULT_SEED)
    except Exception:
        _record(num, False)
        raise
    assert _record(num, rep.passed), [e for e in rep.failures()][:5]


def _selftest_bytes():
    cmd = [sys.executable, "-m", "rfkit", "--seed", str(DEFAULT_SEED), "--format", "json",
           "selftest"]
    r = subprocess.run(cmd, capture_output=True)
    return r.returncode, r.stdout


def test_criterion_10_determinism():
    first, second = _selftest_bytes(), _selftest_bytes()
    ok = first[0] == 0 and first == second and len(first[1]) > 0
    assert _record(10, ok)


if __name__ == "__main__":
    for num, _, fn in CRITERIA:
        _record(num, fn(DEFAULT_SEED).passed)
    a, b = _selftest_bytes(), _selftest_bytes()
    _record(10, a[0] == 0 and a == b)
    for num in sorted(RESULTS):
        print(f"ACCEPTANCE {num}: {RESULTS[num]}")
