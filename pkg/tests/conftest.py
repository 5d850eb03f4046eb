import pytest

from krel import BoundaryPair, assemble, desk_model, identity_pair


@pytest.fixture(scope="session")
def identity_boundary_pair() -> BoundaryPair:
    return identity_pair(1)


@pytest.fixture(scope="session")
def desk_assembly_50():
    return assemble(desk_model(50))


@pytest.fixture(scope="session")
def desk_assembly_200():
    return assemble(desk_model(200))
