import pytest

# (criterion number, title, passed, detail) rows filled by test_acceptance.py
ACCEPTANCE = []


@pytest.fixture
def acceptance():
    def record(num, title, passed, detail=""):
        ACCEPTANCE.append((num, title, bool(passed), detail))
        print(f"[acceptance {num:2d}] {'PASS' if passed else 'FAIL'}  {title}  {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE):
        tr.write_line(f"{num:2d}. {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    passed = sum(ok for *_, ok, _ in ACCEPTANCE)
    tr.write_line(f"{passed}/{len(ACCEPTANCE)} criteria passed")
