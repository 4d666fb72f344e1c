import pytest

from parley.domains import general_asset, load_domain
from parley.nlu import NluRuleSet


@pytest.fixture(scope="session")
def mensa():
    return load_domain("mensa")


@pytest.fixture(scope="session")
def weather():
    return load_domain("weather")


@pytest.fixture(scope="session")
def general_rules():
    return NluRuleSet.from_file(str(general_asset("nlu_rules.json")))
