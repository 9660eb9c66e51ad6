import pytest

from tssimp.data import load_dataset
from tssimp.synthetic import DEFAULT_NAME, write_ucr_pair

# one pass/fail line per acceptance criterion, echoed at the end of the run
acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    write_ucr_pair(str(d))
    return d


@pytest.fixture(scope="session")
def synthetic(data_dir):
    return load_dataset(data_dir, DEFAULT_NAME)


@pytest.fixture
def criterion():
    def report(name: str, ok: bool, detail: str = ""):
        line = f"{'PASS' if ok else 'FAIL'} {name}" + (f"  [{detail}]" if detail else "")
        acceptance_lines.append(line)
        print(line)
        assert ok, line
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
