import math

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def valid_phis(count: int, seed: int, upper_branch: bool = True) -> np.ndarray:
    """Seeded measurement angles kept away from the degenerate values 0 and pi."""
    gen = np.random.default_rng(seed)
    lower = gen.uniform(0.1, math.pi - 0.1, size=count)
    if not upper_branch:
        return lower
    flip = gen.random(count) < 0.5
    return np.where(flip, lower + math.pi, lower)
