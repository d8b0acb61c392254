import pytest

from poisonguard.attack.scenario import BENIGN, PHISHING, VICTIM, build_scenario
from poisonguard.detector import analyze_history
from poisonguard.transfers import registry_default

from support import StubProvider, provider_dataset


@pytest.fixture(scope="session")
def registry():
    return registry_default()


@pytest.fixture(scope="session")
def scenario(registry):
    return build_scenario(VICTIM, BENIGN, PHISHING, registry)


@pytest.fixture(scope="session")
def scenario_verdicts(scenario, registry):
    return analyze_history(scenario, registry)


@pytest.fixture()
def stub(scenario):
    with StubProvider() as server:
        server.httpd.dataset = provider_dataset(scenario)
        yield server
