import pytest

from simqd.kernel import tabulate_kernel
from simqd.material import GAAS_DEFAULT, ThermalEnv


@pytest.fixture(scope="session")
def kernel_04():
    return tabulate_kernel(GAAS_DEFAULT, ThermalEnv(0.4))


@pytest.fixture(scope="session")
def kernel_4():
    return tabulate_kernel(GAAS_DEFAULT, ThermalEnv(4.0))


@pytest.fixture(scope="session")
def kernel_40():
    return tabulate_kernel(GAAS_DEFAULT, ThermalEnv(40.0))
