import random
from typing import Callable

import pytest

from models.instance import Instance


@pytest.fixture
def triangle() -> Instance:
    return Instance.from_coordinates("triangle", [(0, 0), (4, 0), (0, 3)])


@pytest.fixture
def square() -> Instance:
    return Instance.from_coordinates("square", [(0, 0), (10, 0), (10, 10), (0, 10)])


@pytest.fixture
def square_center() -> Instance:
    return Instance.from_coordinates("square-center", [(0, 0), (10, 0), (10, 10), (0, 10), (5, 5)])


@pytest.fixture
def square_notch() -> Instance:
    return Instance.from_coordinates("square-notch", [(0, 0), (10, 0), (10, 10), (0, 10), (5, 1)])


def _random_instance(n: int, seed: int, extent: int = 100, name: str = "") -> Instance:
    rng = random.Random(seed)
    coords = set()
    while len(coords) < n:
        coords.add((rng.randint(0, extent), rng.randint(0, extent)))
    return Instance.from_coordinates(name or f"random-{n}-{seed}", sorted(coords))


@pytest.fixture
def random_instance() -> Callable[..., Instance]:
    """Factory for small seeded instances with distinct integer points."""
    return _random_instance
