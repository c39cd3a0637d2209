"""Shared fixtures: default model parameters and the named conditions."""
import numpy as np
import pytest

from halfdirac import ModelParams, make_class


@pytest.fixture(scope="session")
def p():
    return ModelParams(m=1.0, eps=0.1)


@pytest.fixture(scope="session")
def dirichlet(p):
    return make_class("A12", {}, p)


@pytest.fixture(scope="session")
def condition_a(p):
    return make_class("A14", {"beta": -1.0}, p)


@pytest.fixture(scope="session")
def condition_a_plus(p):
    """The sign-flipped variant of condition (a); no edge modes."""
    return make_class("A14", {"beta": 1.0}, p)


@pytest.fixture(scope="session")
def condition_b(p):
    return make_class("A34", {"beta1": 4.0, "beta2": -4.0, "b12": -1j}, p)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(2024)
