import numpy as np
import pytest
from hypothesis import settings

from rwsqaoa.graphs import Graph

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture
def k4():
    return Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


@pytest.fixture
def edge():
    return Graph.from_edges(2, [(0, 1)])


@pytest.fixture
def cycle6():
    return Graph.from_edges(6, [(i, (i + 1) % 6) for i in range(6)])

