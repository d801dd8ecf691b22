def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LOG
    except ImportError:
        return
    if LOG:
        terminalreporter.section("acceptance criteria")
        for line in LOG:
            terminalreporter.write_line(line)
