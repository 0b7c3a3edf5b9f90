import numpy as np
import pytest

from polyslot import reassemble, wire
from polyslot.categories import haar_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_staircase(rng, d_mem=2):
    """Unitary on [2, 2, 2] with no path from input 2 to output 0.

    Canonical blocks: A = inputs {0, 1}, S = input {2}, T = output {0},
    R = outputs {1, 2}, memory [d_mem].
    """
    first = haar_unitary([2, 2], rng)
    second = haar_unitary([2, 2], rng)
    return reassemble(first, second, wire([2]), wire([2]))
