"""Shared fixtures for the uhyp test suite"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from uhyp.grid import GaussianPacket, GridSpec, InitialData, sample  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale runs (seconds to a minute)")


@pytest.fixture
def default_grid():
    return GridSpec(d=1, n=1, extent=10.0, points=64)


@pytest.fixture
def small_grid():
    return GridSpec(d=1, n=1, extent=10.0, points=32)


def packet(carrier=(3.0, 0.0, 0.0), center=(0.0, 0.0, 0.0), width=(1.0, 1.0, 1.0), amplitude=1 + 0j):
    return GaussianPacket(amplitude=amplitude, center=center, width=width, carrier=carrier)


@pytest.fixture
def packet_data():
    return InitialData(terms=(packet(),))


@pytest.fixture
def unit_gaussian():
    """e^{-(s²+x²+y²)/2}; concentration is off because λ₀ = 0"""
    return InitialData(terms=(packet(carrier=(0.0, 0.0, 0.0)),), enforce_concentration=False)


@pytest.fixture
def packet_field(packet_data, default_grid):
    return sample(packet_data, default_grid)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
