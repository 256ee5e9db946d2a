import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from opdecouple.phase_space import GridSpec

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

odd_n = st.sampled_from([3, 5, 7, 9, 11, 13, 15])
small_odd_n = st.sampled_from([3, 5, 7])
seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def grid(n):
    return GridSpec(n)
