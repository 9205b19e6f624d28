import numpy as np
import pytest

from calabi import make_normalized_domain, project_to_space, project_to_tangent


@pytest.fixture
def d2():
    return make_normalized_domain(2)


@pytest.fixture
def d3():
    return make_normalized_domain(3)


@pytest.fixture
def d16():
    return make_normalized_domain(16)


@pytest.fixture
def d64():
    return make_normalized_domain(64)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture
def u0_d2(d2):
    return project_to_space(d2, np.zeros(2))


@pytest.fixture
def v0_d2(u0_d2):
    return project_to_tangent(u0_d2, np.array([1.0, -1.0]))
