acceptance_lines: list[str] = []


def record(line: str) -> None:
    acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
