from hypothesis import settings

# compiled kernels make the first example slow
settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")

# criterion lines collected by the acceptance suite, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
