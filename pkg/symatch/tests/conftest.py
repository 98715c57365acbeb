"""
Shared fixtures for the symatch test suite

Codes are built once per session; decoder contexts are cached by the
factory, so tests that reuse a code pay for its channels only once.
"""

import numpy as np
import pytest

from symatch.core.registry import CodeRegistry


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale checks (deselect with -m 'not slow')")


@pytest.fixture(scope="session")
def toric4():
    return CodeRegistry.create_code("TC4")


@pytest.fixture(scope="session")
def toric6():
    return CodeRegistry.create_code("TC6")


@pytest.fixture(scope="session")
def d36():
    return CodeRegistry.create_code("D36")


@pytest.fixture(scope="session")
def gross():
    return CodeRegistry.create_code("gross")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

