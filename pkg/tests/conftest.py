import pytest

from soillink.configdir import DEMO_SCENARIO_FILE, find_default
from soillink.simulator import scenario_from_json


@pytest.fixture(scope="session")
def demo_scenario_path():
    return find_default(DEMO_SCENARIO_FILE)


@pytest.fixture()
def demo_scenario(demo_scenario_path):
    return scenario_from_json(demo_scenario_path)
