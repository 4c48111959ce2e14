import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


def record_criterion(number, title, passed, detail=""):
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}"
    if detail:
        line += f"  ({detail})"
    _CRITERIA[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[n])
