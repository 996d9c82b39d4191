import pytest

from femtoflow import RadioParams, SystemParams


@pytest.fixture
def base_params():
    return SystemParams.baseline(M=4, lambda_T=0.8)


@pytest.fixture
def radio():
    return RadioParams()
