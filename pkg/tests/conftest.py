"""Collects acceptance verdicts and prints one line per criterion at the end of the run."""
from collections import OrderedDict

import pytest

_VERDICTS: "OrderedDict[int, dict]" = OrderedDict()


class Recorder:
    def __init__(self, number: int, title: str):
        self.entry = _VERDICTS.setdefault(number, {"title": title, "checks": []})

    def check(self, label: str, ok: bool, detail: str = "") -> bool:
        self.entry["checks"].append((label, bool(ok), detail))
        return bool(ok)


@pytest.fixture
def criterion():
    return Recorder


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        v = _VERDICTS[number]
        failed = [c for c in v["checks"] if not c[1]]
        verdict = "PASS" if v["checks"] and not failed else "FAIL"
        line = f"criterion {number:>2} {verdict}  {v['title']}"
        if failed:
            line += "  [failed: " + "; ".join(f"{c[0]} {c[2]}".strip() for c in failed) + "]"
        tr.write_line(line)
