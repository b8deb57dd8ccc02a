import pytest

# filled by tests/test_acceptance.py: criterion number -> list of (passed, detail)
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        parts = ACCEPTANCE_LINES[number]
        verdict = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"{verdict} criterion {number}: {detail}")


@pytest.fixture
def record_criterion():
    def record(number, passed, detail):
        ACCEPTANCE_LINES.setdefault(number, []).append((bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
        return passed

    return record
