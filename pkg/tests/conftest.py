import pytest

N_CRITERIA = 14
_crit_of = {}
_outcomes = {}
_measured = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            _crit_of[item.nodeid] = m.args[0]


def pytest_runtest_logreport(report):
    crit = _crit_of.get(report.nodeid)
    if crit is None:
        return
    ok = _outcomes.setdefault(crit, {})
    if report.failed:
        ok[report.nodeid] = False
    elif report.when == "call":
        ok.setdefault(report.nodeid, True)
    for key, value in report.user_properties:
        _measured.setdefault(crit, {})[key] = value


@pytest.fixture
def record(request):
    """Store a measured quantity for the acceptance summary."""

    def _record(key, value):
        request.node.user_properties.append((key, value))

    return _record


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def pytest_terminal_summary(terminalreporter):
    if not _crit_of:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in range(1, N_CRITERIA + 1):
        res = _outcomes.get(crit)
        if not res:
            status = "NOT RUN"
        else:
            status = "PASS" if all(res.values()) else "FAIL"
        meas = ", ".join(f"{k}={_fmt(v)}" for k, v in _measured.get(crit, {}).items())
        tr.write_line(f"criterion {crit:2d}: {status}" + (f"  [{meas}]" if meas else ""))
