"""Shared helpers: random interior distributions and small alphabets."""

import numpy as np
import pytest

from seqstat import Alphabet, make_distribution

INTERIOR_FLOOR = 1e-3


def alphabet(size):
    return Alphabet(tuple(range(size)))


def random_interior(rng, size):
    """A distribution with every weight at least INTERIOR_FLOOR."""
    raw = rng.gamma(1.0, 1.0, size) + INTERIOR_FLOOR * size
    weights = raw / raw.sum()
    # mix toward uniform so no weight can round below the floor
    weights = 0.98 * weights + 0.02 / size
    return make_distribution(list(weights / weights.sum()), alphabet(size))


def random_interior_pair(rng, size):
    alph = alphabet(size)
    pair = []
    for _ in range(2):
        raw = rng.gamma(1.0, 1.0, size) + INTERIOR_FLOOR * size
        weights = raw / raw.sum()
        weights = 0.98 * weights + 0.02 / size
        pair.append(make_distribution(list(weights / weights.sum()), alph))
    return pair[0], pair[1]


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)
