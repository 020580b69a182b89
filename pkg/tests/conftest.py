def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        import test_acceptance as acc
    except ImportError:
        return
    if not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(acc.RESULTS):
        desc, ok = acc.RESULTS[num]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num:02d} [{status}] {desc}")
