import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_CRITERIA: dict = {}


@pytest.fixture
def record_criterion():
    def record(result):
        _CRITERIA[result.name] = result
        return result
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split()[0])):
        r = _CRITERIA[name]
        terminalreporter.write_line(f"criterion {r.line()}  ({r.seconds:.1f}s)")
