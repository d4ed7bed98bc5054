import numpy as np
import pytest

from spinberry import DiracFamily


@pytest.fixture(scope="session")
def fam():
    return DiracFamily()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spins(rng, n, min_perp=0.1, radius=(0.5, 2.0)):
    out = []
    while len(out) < n:
        d = rng.normal(size=3)
        s = d / np.linalg.norm(d) * rng.uniform(*radius)
        if np.hypot(s[0], s[1]) > min_perp:
            out.append(s)
    return np.array(out)
