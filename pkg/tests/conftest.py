import logging

import pytest

from expmap.core.census import bifurcation_child
from expmap.core.components import period_one_component
from expmap.core.config import get_config
from expmap.core.symbolic import ExternalAddress


@pytest.fixture(autouse=True)
def check_log_for_exceptions(caplog):
    caplog.set_level(logging.ERROR)
    yield
    assert caplog.get_records("call") == []


@pytest.fixture
def config():
    return get_config()


@pytest.fixture(scope="session")
def period_one():
    return period_one_component(0)


@pytest.fixture(scope="session")
def period_two(period_one):
    return bifurcation_child(period_one, 1, 2)


@pytest.fixture(scope="session")
def period_three(period_one):
    return bifurcation_child(period_one, 1, 3)


@pytest.fixture
def zero():
    return ExternalAddress.periodic(0)


@pytest.fixture
def zero_one():
    return ExternalAddress.periodic(0, 1)
