import math

import pytest

from quadcoherence.numquad import IntegrationConfig
from quadcoherence.states import fock_wavefunction, pure_kernel


@pytest.fixture
def cfg():
    return IntegrationConfig()


@pytest.fixture
def vacuum():
    return pure_kernel(fock_wavefunction(0))


@pytest.fixture
def half():
    return 1 / math.sqrt(2)
