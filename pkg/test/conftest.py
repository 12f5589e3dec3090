import logging

import numpy as np
import pytest
from dotenv import load_dotenv

from torus_zeros.config.run_config import RunConfig, init_run_config, reset_run_config

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(threadName)-10s - %(name)s - %(levelname)s - %(message)s",
)

load_dotenv()


@pytest.fixture(autouse=True)
def run_config():
    """Small grids and sample counts; the global configuration is reset after every test."""
    reset_run_config()
    config = init_run_config(RunConfig.for_testing())
    yield config
    reset_run_config()


@pytest.fixture
def rng():
    return np.random.default_rng(11)
