import logging

import numpy as np
import pytest

from faker import Faker
from pytest_mock import MockerFixture

from jackmac.settings import debug_enabled, default_seed, default_trials
from jackmac.simkernel import ArrayConfig


@pytest.fixture
def mocker(mocker: MockerFixture) -> MockerFixture:
    return mocker


@pytest.fixture
def faker() -> Faker:
    fake = Faker()
    fake.seed_instance(default_seed())

    return fake


@pytest.fixture(autouse=True)
def _debug_logging(caplog):
    # JACKMAC_DEBUG=true surfaces saturation, flush and tile logs in failures
    caplog.set_level(logging.DEBUG if debug_enabled() else logging.WARNING, logger="jackmac")

    yield


@pytest.fixture
def trials() -> int:
    return default_trials()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(default_seed())


@pytest.fixture
def jack() -> ArrayConfig:
    return ArrayConfig.preset("jack")


@pytest.fixture
def baseline() -> ArrayConfig:
    return ArrayConfig.preset("baseline")
