import numpy as np
import pytest

from ddchain.model import CoefficientSeries, ModelParams


@pytest.fixture(scope="session")
def fig2_params():
    """Reference parameter point used throughout: Omega=0.5, Gamma=0.1,
    beta=10 in units of the hopping."""
    return ModelParams(omega=0.5, big_gamma=0.1, beta=10.0)


@pytest.fixture(scope="session")
def fig2_series(fig2_params):
    return CoefficientSeries.build(fig2_params, k=np.pi / 2 + 0.1)
