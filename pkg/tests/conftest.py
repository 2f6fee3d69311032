"""
Pytest configuration and shared fixtures
"""

import random
import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.fixtures import e1, order3_rotation, triangle
from src.tree_core import FiniteSubtree


@pytest.fixture
def e1_sphero():
    """The smallest non-automorphic spheromorphism (two-piece perfect forest)"""
    return e1()


@pytest.fixture
def rng():
    """Seeded random generator, identical in every test"""
    return random.Random(20240101)


@pytest.fixture
def root_only():
    """The one-vertex subtree {eps}"""
    return FiniteSubtree.of(())


@pytest.fixture
def small_subtree():
    """eps with its first two children"""
    return FiniteSubtree.of((), (1,), (2,))


@pytest.fixture
def path_subtree():
    """A path eps - 1 - 1.1"""
    return FiniteSubtree.of((), (1,), (1, 1))


@pytest.fixture
def rotation():
    """x -> 1/(1 - x), order 3"""
    return order3_rotation()


@pytest.fixture
def tri():
    """Ideal triangle (0, 1, inf)"""
    return triangle()


@pytest.fixture
def tmp_json(tmp_path):
    """Write a JSON string to a temporary file and return the path"""
    def write(text: str, name: str = "obj.json") -> Path:
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p
    return write
