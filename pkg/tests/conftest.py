import pytest

# criterion number -> (status, title), filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, title = ACCEPTANCE[number]
        terminalreporter.write_line(f"{status} criterion {number}: {title}")
    passed = sum(1 for s, _ in ACCEPTANCE.values() if s == "PASS")
    terminalreporter.write_line(f"{passed}/{len(ACCEPTANCE)} criteria pass")


@pytest.fixture
def criterion(capsys):
    """Record and print one PASS/FAIL line per acceptance criterion."""

    class Recorder:
        def __init__(self):
            self.number = None

        def __call__(self, number, title):
            self.number, self.title = number, title
            return self

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            status = "FAIL" if exc_type else "PASS"
            ACCEPTANCE[self.number] = (status, self.title)
            with capsys.disabled():
                print(f"\n{status} criterion {self.number}: {self.title}")
            return False

    return Recorder()
