"""Session-wide systems shared across the test modules.

Everything here is deterministic, so building each system once is safe; the
cat map runs its construction-time identity sweep only on first use.
"""

import pytest

from selfsimilar.core import refine_metric
from selfsimilar.symbolic import four_symbol, full_shift, golden_mean
from selfsimilar.torus import CircleDoubling, cat_map, euclidean_base


@pytest.fixture(scope="session")
def full2():
    return full_shift(2)


@pytest.fixture(scope="session")
def golden():
    return golden_mean()


@pytest.fixture(scope="session")
def four():
    return four_symbol()


@pytest.fixture(scope="session")
def cat():
    return cat_map()


@pytest.fixture(scope="session")
def euclid(cat):
    return euclidean_base(cat)


@pytest.fixture(scope="session")
def refined_euclid(euclid):
    # window 23 at this tolerance; wide enough that the truncated supremum
    # agrees with the infinite one on every pair the samplers can produce
    return refine_metric(euclid, 1.8, 1e-6)


@pytest.fixture(scope="session")
def doubling():
    return CircleDoubling()
