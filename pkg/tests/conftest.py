import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from disktrap import config  # noqa: E402
from disktrap.core import default_config_path, load_species, mode_catalog, read_json  # noqa: E402


@pytest.fixture(scope="session")
def default_doc():
    return read_json(default_config_path())


@pytest.fixture(scope="session")
def species(default_doc):
    return load_species(default_doc["species"])


@pytest.fixture(scope="session")
def catalog(default_doc):
    return mode_catalog(default_doc["modes"])


@pytest.fixture(scope="session")
def d30():
    return config.load_scenario("d30_optimum")


@pytest.fixture(scope="session")
def d15():
    return config.load_scenario("d15_optimum")


CRITERIA: dict[int, str] = {}


def record(number: int, ok: bool, detail: str):
    """Print and remember one acceptance line; the summary hook repeats them at the end."""
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
