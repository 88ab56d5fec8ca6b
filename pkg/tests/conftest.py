import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def portraits(draw, min_depth=1, max_depth=8):
    """Raw parity arrays of a random depth."""
    n = draw(st.integers(min_depth, max_depth))
    bits = draw(st.lists(st.integers(0, 1), min_size=(1 << n) - 1, max_size=(1 << n) - 1))
    return np.array(bits, dtype=np.uint8)


@st.composite
def portrait_pairs(draw, min_depth=1, max_depth=8):
    n = draw(st.integers(min_depth, max_depth))
    width = (1 << n) - 1
    a = draw(st.lists(st.integers(0, 1), min_size=width, max_size=width))
    b = draw(st.lists(st.integers(0, 1), min_size=width, max_size=width))
    return np.array(a, dtype=np.uint8), np.array(b, dtype=np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
