ACCEPTANCE_LINES = []

PUBLISHED_ANGLES_DEG = {
    2: (37.33, 82.67),
    3: (30.45, 54.28, 67.09),
    5: (22.58, 33.60, 46.64, 68.50, 75.10),
}


def record_criterion(number, title, passed, detail=""):
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] criterion {number:>2}: {title}" + (f" -- {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
