import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from toggleopt.benchgen import benchmark_names, load_benchmark  # noqa: E402
from toggleopt.netlist import parse_blif  # noqa: E402

BUF = ".model buf\n.inputs a\n.outputs y\n.names a y\n1 1\n.end\n"


@pytest.fixture
def buf_netlist():
    return parse_blif(BUF)


@pytest.fixture(scope="session")
def benchmarks():
    return {name: load_benchmark(name) for name in benchmark_names()}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
