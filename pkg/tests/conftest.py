import pytest

from approxdct import codec, transforms
from approxdct.imageio import load_bundled_corpus

_acceptance = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        doc = getattr(report, "criterion", None) or report.nodeid.split("::")[-1]
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIPPED"}[report.outcome]
        _acceptance.append((doc, status))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker:
        rep.criterion = marker.args[0]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _acceptance:
        terminalreporter.write_line(f"{status:8} {label}")


@pytest.fixture(scope="session")
def corpus():
    return load_bundled_corpus()


@pytest.fixture(scope="session")
def proposed():
    return transforms.build_proposed()


@pytest.fixture(scope="session")
def dct():
    return transforms.build_exact_dct()


@pytest.fixture(scope="session")
def wht():
    return transforms.build_wht()


@pytest.fixture(scope="session")
def orthogonal_specs(proposed, dct, wht):
    return [proposed, dct, wht]


@pytest.fixture(scope="session")
def corpus_sweep(orthogonal_specs, corpus):
    """Full default-r sweep (PSNR/MSE only) shared by the slow tests."""
    return codec.sweep(orthogonal_specs, corpus, codec.DEFAULT_R_VALUES, with_uqi=False)
