import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import write_surrogate_mushroom  # noqa: E402


@pytest.fixture(scope="session")
def surrogate_mushroom(tmp_path_factory):
    return write_surrogate_mushroom(tmp_path_factory.mktemp("mushroom") / "agaricus-lepiota.data")


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
