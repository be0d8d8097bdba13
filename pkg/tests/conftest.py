import pytest

# criterion number -> list of (passed, detail)
ACCEPTANCE = {}


@pytest.fixture
def record():
    def _record(criterion, passed, detail, informational=False):
        ACCEPTANCE.setdefault(criterion, []).append((bool(passed), detail, informational))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        entries = ACCEPTANCE[criterion]
        checks = [e for e in entries if not e[2]]
        ok = all(p for p, _, _ in checks)
        details = "; ".join(d for p, d, info in checks)
        tr.write_line(f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {details}")
        for p, d, info in entries:
            if info:
                tr.write_line(f"             info: {d}")
