import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from suppesnet.dataset import GenotypeMatrix  # noqa: E402

D6_ROWS = [[1, 1, 1], [1, 1, 0], [1, 0, 0], [1, 0, 0], [0, 0, 0], [0, 0, 0]]


def make(rows, labels=None):
    return GenotypeMatrix.from_array(np.array(rows), labels)


@pytest.fixture
def d6():
    return make(D6_ROWS, ["a", "b", "c"])


@pytest.fixture
def d6x50():
    return make(D6_ROWS * 50, ["a", "b", "c"])
