import pytest

from collabsec.network import EmailIdentity, make_network

_criteria: dict[int, list] = {}


def graph(n, edges, breaches=None, domain="x.edu"):
    """Network on ``n`` nodes from ``(u, v)`` or ``(u, v, w)`` tuples."""
    weights = {}
    for e in edges:
        weights[(e[0], e[1])] = e[2] if len(e) > 2 else 1
    emails = [EmailIdentity(f"n{i}", domain) for i in range(n)]
    return make_network(emails, weights, domain, breaches)


def path_edges(n):
    return [(i, i + 1) for i in range(n - 1)]


def complete_edges(n):
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): acceptance criterion reported in the summary"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        number, title = marker.args
        entry = _criteria.setdefault(number, [title, True])
        entry[1] = entry[1] and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}")
