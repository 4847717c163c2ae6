import pytest
from hypothesis import settings

# property tests draw the same examples on every run
settings.register_profile("repo", derandomize=True)
settings.load_profile("repo")

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def verdict(request, capsys):
    """Record and echo one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def emit(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines.append(line)
        with capsys.disabled():
            print(f"\n{line}")

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
