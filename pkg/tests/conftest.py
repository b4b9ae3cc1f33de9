import pytest

from lammos import defaults


@pytest.fixture
def motor():
    return defaults.default_motor()


@pytest.fixture
def screw():
    return defaults.default_screw()


@pytest.fixture
def spring():
    return defaults.default_spring()


@pytest.fixture
def fsm():
    return defaults.default_latch_fsm()
