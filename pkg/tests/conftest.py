import math
import os
from collections.abc import Callable, Iterator

import numpy as np
import pytest
import structlog

from neutron_ghz.config import RunConfig
from neutron_ghz.quantum import DIM, DensityMatrix, GhzSign, densify, ghz_state
from neutron_ghz.settings import get_settings

ENV_PREFIX = "NEUTRON_GHZ_"


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    for name in list(os.environ):
        if name.startswith(ENV_PREFIX):
            monkeypatch.delenv(name)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
    structlog.reset_defaults()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def random_density(rng: np.random.Generator) -> Callable[[], DensityMatrix]:
    def make() -> DensityMatrix:
        g = rng.normal(size=(DIM, DIM)) + 1j * rng.normal(size=(DIM, DIM))
        rho = g @ g.conj().T
        rho = (rho + rho.conj().T) / 2
        return DensityMatrix(rho / np.trace(rho).real)

    return make


@pytest.fixture
def plus_rho() -> DensityMatrix:
    return densify(ghz_state(GhzSign.PLUS))


@pytest.fixture
def noiseless_config() -> RunConfig:
    return RunConfig(noiseless=True, repeats=1)


@pytest.fixture
def angles() -> list[float]:
    return [0.0, math.pi / 3, math.pi / 2, 2.0, math.pi, 4.5, 3 * math.pi / 2]
