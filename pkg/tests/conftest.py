import pytest
from click.testing import CliRunner

from agents.orchestrator import OrchestratorAgent
from config import NavigatorSettings
from lattice.core import GramMatrix, I_LATTICE, A_LATTICE, J_LATTICE, k4, k_family


@pytest.fixture(scope='module')
def settings():
    """Settings independent of any .env on the machine running the tests."""
    return NavigatorSettings(max_disc=100000, threads=1, stable_suite_max_disc=30)


@pytest.fixture(scope='module')
def orchestrator(settings):
    return OrchestratorAgent(settings)


@pytest.fixture(scope='module')
def oracle(orchestrator):
    return orchestrator.oracle


@pytest.fixture(scope='module')
def stable_agent(orchestrator):
    return orchestrator.stable


@pytest.fixture(scope='module')
def ascent_agent(orchestrator):
    return orchestrator.ascent


@pytest.fixture(scope='module')
def reporter(orchestrator):
    return orchestrator.reporter


@pytest.fixture(scope='module')
def named():
    """The order-48 lattices and a few small forms used throughout."""
    return {
        'I': I_LATTICE,
        'A': A_LATTICE,
        'J': J_LATTICE,
        'D113': GramMatrix.diagonal(1, 1, 3),
        'D123': GramMatrix.diagonal(1, 2, 3),
        'D1125': GramMatrix.diagonal(1, 1, 25),
        'K1': k_family(1),
        'K4_295': k4(1, 295),
    }


@pytest.fixture(scope='module')
def runner():
    """Click test runner for the command line."""
    return CliRunner()
