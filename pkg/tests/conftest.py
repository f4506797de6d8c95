import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    number, title = mark.args
    outcome = "PASS" if call.excinfo is None else "FAIL"
    prev = ACCEPTANCE.get(number)
    if prev is None or prev[1] == "PASS":
        ACCEPTANCE[number] = (title, outcome)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, outcome = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{outcome}] {number}. {title}")
