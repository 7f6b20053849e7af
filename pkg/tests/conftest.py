import pytest

from cerebro.analysis import generate_synthetic_scan, process_scan
from cerebro.config import default_config


@pytest.fixture(scope="session")
def config():
    return default_config()


@pytest.fixture(scope="session")
def scan0():
    return generate_synthetic_scan(0)


@pytest.fixture(scope="session")
def network0(scan0, config):
    forest, _ = scan0
    network, _ = process_scan(forest, config, scan_id="seed0")
    return network


@pytest.fixture(scope="session")
def scene0(scan0, config):
    forest, _ = scan0
    _, scene = process_scan(forest, config, scan_id="seed0")
    return scene
