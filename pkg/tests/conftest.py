import pytest
from hypothesis import HealthCheck, settings

from gogtools import instances

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def zz():
    return instances.graph("zz")


@pytest.fixture(scope="session")
def trefoil():
    return instances.graph("trefoil")


@pytest.fixture(scope="session")
def bs12():
    return instances.graph("bs12")
