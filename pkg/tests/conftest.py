"""Shared fixtures: the shipped scenario and small hand-sized problems."""

import pytest

from twincontract.core.channel import ChannelParams, MigrationTask
from twincontract.core.contract import GridSpec
from twincontract.core.economics import ScenarioParams, TypeSpectrum
from twincontract.experiments.scenario import load_default_scenario

MB = 8e6


@pytest.fixture
def channel():
    """Default radio link: 23 dBm, h0 = 1, 500 m, alpha = 2, -174 dBm/Hz."""
    return ChannelParams()


@pytest.fixture
def params(channel):
    """100 MB task, T = 5 s, K = 50 s, beta = 200."""
    return ScenarioParams(task=MigrationTask(data_bits=100 * MB), channel=channel, beta=200.0)


@pytest.fixture
def default_scenario():
    return load_default_scenario()


@pytest.fixture
def coarse_grid():
    """50 points from 1 MHz to 5.9 MHz; admissible for a 100 MB task."""
    return GridSpec(b_min=1e6, b_max=5.9e6, step=1e5)


@pytest.fixture
def four_types():
    return TypeSpectrum.uniform([1e11, 2e11, 3e11, 4e11], population=10)
