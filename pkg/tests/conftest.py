from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(lo=-10, hi=10, max_den=20):
    return st.builds(lambda n, d: Fraction(n, d), st.integers(lo * max_den, hi * max_den),
                     st.integers(1, max_den))


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(12345)
