import pytest

from wvlab import family


@pytest.fixture(scope="session")
def exp_series():
    return family("exp")


@pytest.fixture(scope="session")
def geometric_series():
    return family("geometric")


@pytest.fixture(scope="session")
def kovari1_series():
    return family("kovari", rho=1)


@pytest.fixture(scope="session")
def suleimanov_half_series():
    return family("suleimanov", epsilon=0.5)
