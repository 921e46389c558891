import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from epilink import ContactNetwork, watts_strogatz


@pytest.fixture(scope="session")
def ws100():
    """The standard 100-node, 600-edge small-world network."""
    return watts_strogatz(100, 12, 0.2, seed=7)


@pytest.fixture
def path3():
    """3-node path 0-1-2."""
    return ContactNetwork(node_count=3, edges=[[0, 1], [1, 2]])


@pytest.fixture
def cycle4():
    """4-node cycle."""
    return ContactNetwork(node_count=4, edges=[[0, 1], [1, 2], [2, 3], [0, 3]])
