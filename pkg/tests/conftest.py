import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


@st.composite
def complex_vectors(draw, min_size=1, max_size=24, size=None):
    if size is None:
        size = draw(st.integers(min_size, max_size))
    re = draw(st.lists(finite, min_size=size, max_size=size))
    im = draw(st.lists(finite, min_size=size, max_size=size))
    return np.array(re) + 1j * np.array(im)


@st.composite
def vector_pairs(draw, max_size=24):
    n = draw(st.integers(1, max_size))
    return draw(complex_vectors(size=n)), draw(complex_vectors(size=n))


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_signal(rng, n, variant):
    x = crandn(rng, n)
    if variant == "A":
        x[0] = x[0].real
    return x


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)
