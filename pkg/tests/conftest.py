from dataclasses import dataclass

import numpy as np
import pytest

_ACCEPTANCE = pytest.StashKey[list]()


@dataclass
class AcceptanceLine:
    criterion: str
    label: str
    ok: bool
    detail: str


class AcceptanceRecorder:
    def __init__(self, store):
        self.store = store

    def check(self, criterion, label, ok, detail=""):
        line = AcceptanceLine(str(criterion), label, bool(ok), detail)
        self.store.append(line)
        print(f"[{'PASS' if ok else 'FAIL'}] AC{criterion} {label} {detail}")
        return ok


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    return AcceptanceRecorder(request.config.stash[_ACCEPTANCE])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    by_crit = {}
    for ln in lines:
        by_crit.setdefault(ln.criterion, []).append(ln)
    for crit in sorted(by_crit, key=lambda c: int(c)):
        parts = by_crit[crit]
        status = "PASS" if all(p.ok for p in parts) else "FAIL"
        tr.write_line(f"criterion {crit:>2}: {status}")
        for p in parts:
            tr.write_line(f"    [{'PASS' if p.ok else 'FAIL'}] {p.label}: {p.detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
