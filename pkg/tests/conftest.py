import pytest

from lapgeo import generators
from lapgeo.config import RunConfig, Tolerances


@pytest.fixture
def tol():
    return Tolerances()


@pytest.fixture
def run():
    return RunConfig(subcommand="test")


@pytest.fixture(scope="session")
def unit_circle():
    return generators.generate("circle", {"r": 1.0})


@pytest.fixture(scope="session")
def sphere():
    return generators.generate("sphere", {"r": 1.0})


@pytest.fixture(scope="session")
def cylinder():
    return generators.generate("cylinder", {"a": 1.0})


@pytest.fixture(scope="session")
def helix():
    return generators.generate("helix")


@pytest.fixture(scope="session")
def gamma_eps():
    return generators.generate("gamma_eps")


@pytest.fixture(scope="session")
def diagonal():
    return generators.generate("two_circle_diagonal")


@pytest.fixture(scope="session")
def ellipse():
    return generators.generate("ellipse")
