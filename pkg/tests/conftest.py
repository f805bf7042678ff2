import numpy as np
import pytest

from cmvsub import Constant, QuasiPeriodic, RandomIID


def random_source(rng):
    """Draw one of the stationary two-sided families with random parameters."""
    kind = int(rng.integers(0, 3))
    if kind == 0:
        return RandomIID(seed=int(rng.integers(0, 2**31)),
                         radius=float(rng.uniform(0.2, 0.65)))
    if kind == 1:
        return QuasiPeriodic(coupling=float(rng.uniform(0.1, 0.65)),
                             frequency=float(rng.uniform(0.05, 0.95)),
                             phase=float(rng.uniform(0.0, 1.0)))
    a = complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
    if abs(a) >= 0.9:
        a *= 0.9 / abs(a)
    return Constant(a)


def unit_z(rng):
    return complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)
