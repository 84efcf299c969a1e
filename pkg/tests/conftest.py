ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, elapsed, limit, title = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {status}  {elapsed:7.2f}s (limit {limit}s)  {title}")
