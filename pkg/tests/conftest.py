import pytest

from dasc.program import parse_program
from dasc.rdg import build_rdg_prime

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def acceptance_line(request):
    """Record and print the verdict line for one acceptance criterion."""
    results = request.config.stash[_RESULTS]

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})"
        results[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])


@pytest.fixture
def graph_of():
    def build(text: str):
        return build_rdg_prime(parse_program(text))
    return build
