import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from models.errors import InputError
from models.instance import Instance
from utils.helpers import GENERATOR_EXTENT

logger = logging.getLogger(__name__)

Coords = List[Tuple[int, int]]


def _take_distinct(rng: np.random.Generator, n: int, draw: Callable[[np.random.Generator, int], np.ndarray]) -> Coords:
    seen: Dict[Tuple[int, int], None] = {}
    while len(seen) < n:
        batch = draw(rng, n - len(seen))
        for x, y in batch.tolist():
            if len(seen) == n:
                break
            seen.setdefault((x, y), None)
    return list(seen)


def uniform_points(n: int, seed: int, extent: int = GENERATOR_EXTENT) -> Coords:
    """n distinct integer points drawn uniformly from [0, extent]^2."""
    if n > (extent + 1) ** 2:
        raise InputError(f"cannot place {n} distinct points in [0, {extent}]^2")
    rng = np.random.default_rng(seed)
    return _take_distinct(rng, n, lambda r, k: r.integers(0, extent, size=(k, 2), endpoint=True))


def clustered_points(n: int, seed: int, extent: int = GENERATOR_EXTENT, clusters: Optional[int] = None) -> Coords:
    """Gaussian clusters around uniform centres; points outside the square are redrawn."""
    rng = np.random.default_rng(seed)
    k = clusters or max(1, round(math.sqrt(n) / 4))
    centres = rng.uniform(0, extent, size=(k, 2))
    spread = extent / (4.0 * math.sqrt(k))

    def draw(r: np.random.Generator, count: int) -> np.ndarray:
        picks = r.integers(0, k, size=count)
        pts = np.rint(centres[picks] + r.normal(0.0, spread, size=(count, 2))).astype(np.int64)
        inside = (pts >= 0).all(axis=1) & (pts <= extent).all(axis=1)
        return pts[inside]

    return _take_distinct(rng, n, draw)


DISTRIBUTIONS = {
    "uniform": uniform_points,
    "clustered": clustered_points,
}


def generate_instance(n: int, distribution: str = "uniform", seed: int = 0, name: Optional[str] = None) -> Instance:
    if n < 3:
        raise InputError(f"an instance needs at least 3 points, got {n}")
    make = DISTRIBUTIONS.get(distribution)
    if make is None:
        raise InputError(f"unknown distribution {distribution!r}; choose from {', '.join(DISTRIBUTIONS)}")
    coords = make(n, seed)
    instance = Instance.from_coordinates(name or f"{distribution}-{n}-{seed}", coords)
    logger.debug("Generated %s", instance.name)
    return instance
