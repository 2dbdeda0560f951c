import numpy as np
import pytest

from renormqp.config import RenormConfig
from renormqp.qp import phi_on_W
from renormqp.renorm1d import feigenbaum


@pytest.fixture(scope="session")
def cfg():
    return RenormConfig()


@pytest.fixture(scope="session")
def fixed_point(cfg):
    return feigenbaum(cfg)


@pytest.fixture(scope="session")
def phi(fixed_point):
    """The 1-D fixed point on the even domain."""
    return fixed_point.phi


@pytest.fixture(scope="session")
def phi_w(cfg):
    """The fixed point re-expanded on the off-centre disc."""
    return phi_on_W(cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(20111)
