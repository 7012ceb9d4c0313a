"""Collects acceptance-criterion outcomes and prints one line per criterion."""

_OUTCOMES: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")

def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            item.user_properties.append(("criterion", mark.args))

def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    number, title = props["criterion"]
    failed = report.failed or (report.when == "call" and not report.passed)
    if failed:
        _OUTCOMES[number] = ("FAIL", title)
    elif report.when == "call" and number not in _OUTCOMES:
        _OUTCOMES[number] = ("PASS", title)

def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        status, title = _OUTCOMES[number]
        terminalreporter.write_line(f"AC{number:<3} {status}  {title}")
