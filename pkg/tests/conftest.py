import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

try:
    import skinseg  # noqa: F401
except ImportError:  # running from a checkout without installing
    sys.path.insert(0, str(Path(__file__).parent.parent / "src"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion."""
    rows = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            if getattr(rep, "when", "call") != "call":
                continue
            if "test_acceptance.py::test_criterion_" not in rep.nodeid:
                continue
            name = rep.nodeid.split("::")[-1]
            number = int(name.split("_")[2])
            label = " ".join(name.split("_")[3:])
            rows.append((number, label, status, rep.duration))
    if not rows:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number, label, status, duration in sorted(rows):
        verdict = "PASS" if status == "passed" else "FAIL"
        terminalreporter.write_line(
            f"{verdict}  criterion {number:2d} ({label}) [{duration:.1f}s]"
        )
