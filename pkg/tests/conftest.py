import numpy as np
import pytest

from slowlight.calibration import profiles
from slowlight.vapor import FrequencyGrid, VaporConfig, default_line_table

HOT = 403.15  # 130 C
WARM = 353.15  # 80 C


@pytest.fixture(scope="session")
def default_grid():
    return FrequencyGrid.centered(40e9, 2 ** 16)


@pytest.fixture(scope="session")
def table():
    return default_line_table()


@pytest.fixture(scope="session")
def hot_config():
    return VaporConfig(temperature=HOT)


@pytest.fixture(scope="session")
def hot_profiles(hot_config, table, default_grid):
    """(sigma+, sigma-) index profiles at 130 C, zero field."""
    return profiles(hot_config, table, default_grid)


@pytest.fixture(scope="session")
def hot_profiles_16mt(hot_config, table, default_grid):
    return profiles(hot_config.with_(b_field=0.016), table, default_grid)


@pytest.fixture(scope="session")
def warm_config():
    return VaporConfig(temperature=WARM, b_field=0.008)


@pytest.fixture(scope="session")
def warm_profiles(warm_config, table, default_grid):
    return profiles(warm_config, table, default_grid)


@pytest.fixture(scope="session")
def warm_zero_field(warm_config, table, default_grid):
    return profiles(warm_config.with_(b_field=0.0), table, default_grid)[0]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
