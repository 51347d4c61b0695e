import random

import pytest

from realcirc.logic import Signature


@pytest.fixture
def sig_f():
    return Signature(numbers=(("f", 1),))


@pytest.fixture
def sig_fg():
    return Signature(numbers=(("f", 1), ("g", 2)))


@pytest.fixture
def rng():
    return random.Random(1234)
