import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, note = ACCEPTANCE[n]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}"
        if note:
            line += f"  [{note}]"
        terminalreporter.write_line(line)
