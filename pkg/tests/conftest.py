"""Shared fixtures; collects one verdict line per acceptance criterion."""

from __future__ import annotations

from collections import defaultdict

import numpy as np
import pytest

from hpminimal import ClassifiedSurface, make_classified

_VERDICTS: dict[int, dict] = defaultdict(lambda: {"title": "", "cases": []})


class Recorder:
    def __init__(self, number: int, title: str):
        self.number = number
        _VERDICTS[number]["title"] = title

    def __call__(self, case: str, ok: bool, detail: str = "") -> bool:
        ok = bool(ok)
        _VERDICTS[self.number]["cases"].append((case, ok, detail))
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {self.number} {case}: {detail}")
        return ok


@pytest.fixture
def criterion():
    return Recorder


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        entry = _VERDICTS[number]
        cases = entry["cases"]
        failed = [c for c in cases if not c[1]]
        verdict = "PASS" if cases and not failed else "FAIL"
        line = f"{verdict}  {number}. {entry['title']} ({len(cases) - len(failed)}/{len(cases)} cases)"
        if failed:
            line += "; failing: " + ", ".join(f"{c[0]} [{c[2]}]" for c in failed)
        tr.write_line(line)


@pytest.fixture(scope="session")
def clifford2():
    return make_classified(ClassifiedSurface(2, "clifford"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
