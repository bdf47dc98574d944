import numpy as np
import pytest
from hypothesis import settings

from qgrouprep.group import load_group_spec

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def c2xd4_spec():
    return load_group_spec("c2xd4")


@pytest.fixture(scope="session")
def c2xd4(c2xd4_spec):
    return c2xd4_spec.build()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
