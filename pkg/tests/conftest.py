import pytest
from hypothesis import settings

from degmaps.catalog import load_catalog
from degmaps.obstruction import compute_all, make_context

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session", params=[1, -1], ids=["s=+1", "s=-1"])
def signed_catalog(request):
    return load_catalog(sign=request.param)


@pytest.fixture(scope="session")
def ctx(catalog):
    return make_context(catalog)


@pytest.fixture(scope="session")
def results(ctx):
    return compute_all(ctx)


# acceptance criteria summary ------------------------------------------------

_CRITERIA: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    rep = (yield).get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed and not rep.skipped):
        return
    if rep.when == "call" or rep.failed or rep.skipped:
        if hasattr(rep, "wasxfail"):
            status = "XFAIL" if rep.skipped else "XPASS"
        else:
            status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        _CRITERIA.setdefault(mark.args[0], []).append((mark.args[1], f"{status} [{item.name}]"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        for title, status in _CRITERIA[n]:
            terminalreporter.write_line(f"criterion {n} ({title}): {status}")
