import numpy as np
import pytest

from CARMApytools.carma import CarmaSpec
from CARMApytools.credit import RecoveryParams
from CARMApytools.levy import Brownian

#: Fitted CARMA(2,1) of daily log-returns, b(z) = 2 + z.
CARMA21_A = [1.39631, 0.05029]
CARMA21_B = [2., 1.]
#: Stochastic recovery parameters of the same fit.
BETA = (0.0378, -0.0095, 0.637)


@pytest.fixture
def rng():
    return np.random.default_rng(20231017)


@pytest.fixture
def car1():
    return CarmaSpec([6.])


@pytest.fixture
def carma21():
    return CarmaSpec(CARMA21_A, CARMA21_B)


@pytest.fixture
def bm():
    return Brownian(0., 1.)


@pytest.fixture
def srr_params():
    return RecoveryParams.stochastic(*BETA)


@pytest.fixture
def crr_params():
    return RecoveryParams.constant(0.4)
