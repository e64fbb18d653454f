def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    if acceptance is None or not acceptance.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(acceptance.REPORT, key=lambda k: (int(k.split()[0]), k)):
        terminalreporter.write_line(acceptance.REPORT[key])
