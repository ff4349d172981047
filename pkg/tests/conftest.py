import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one line per acceptance criterion after the run."""
    mod = None
    for name, candidate in list(sys.modules.items()):
        if name.rsplit(".", 1)[-1] == "test_acceptance" and hasattr(candidate, "RESULTS"):
            mod = candidate
            break
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for criterion, outcome in mod.RESULTS.items():
        terminalreporter.write_line(f"[{criterion}] {outcome}")
