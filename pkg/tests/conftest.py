import os

import hypothesis
import numpy as np
import pytest

from prophet_thresholds.app.container import Container
from prophet_thresholds.domain.models import Instance, ThresholdPolicy, ValueDistribution
from prophet_thresholds.services.instances import iid_instance, random_corpus

hypothesis.settings.register_profile("default", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=500, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def _reset_container():
    yield
    Container.reset()


@pytest.fixture
def unit_atom() -> ValueDistribution:
    return ValueDistribution.from_pairs([(1.0, 1.0)])


@pytest.fixture
def four_ones(unit_atom) -> Instance:
    """Four applicants with value 1 for sure, two units of supply."""
    return iid_instance(2, 4, unit_atom)


@pytest.fixture
def half_policy() -> ThresholdPolicy:
    return ThresholdPolicy(t=1.0, p=0.5)


@pytest.fixture(scope="session")
def corpus() -> list[Instance]:
    return random_corpus(30)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
