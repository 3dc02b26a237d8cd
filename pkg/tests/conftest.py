import pytest

from nceig.eigensolver import available_backends

ACCEPTANCE_LINES = []


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
