"""
Test configuration and fixtures for qreality tests.
"""
import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from click.testing import CliRunner

from qreality import create_cli
from config import Config

SAMPLES = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'samples'))


class TestConfig(Config):
    """Test configuration."""
    TESTING = True
    JOBS = 1
    MAX_BRANCHES = 100000


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='run the long experiments')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long experiment, needs --runslow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope='session')
def cli():
    """The command group built with the test configuration."""
    return create_cli(TestConfig)


@pytest.fixture(scope='function')
def runner():
    """A click runner for invoking commands."""
    return CliRunner(mix_stderr=False)


@pytest.fixture(scope='session')
def sample():
    """Absolute path of a file under samples/."""
    def path(name):
        return os.path.join(SAMPLES, name)
    return path
