import random

import pytest
from hypothesis import HealthCheck, settings

import gen

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def cover2():
    return gen.full_cover_system(2)


@pytest.fixture(scope="session")
def cover3():
    return gen.full_cover_system(3)


@pytest.fixture(scope="session")
def p3_s2():
    return gen.graph_system("p3", 2)


@pytest.fixture(scope="session")
def k3_s2():
    return gen.graph_system("k3", 2)


@pytest.fixture()
def rng():
    return random.Random(0xC0FFEE)
