from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from utils.helpers import COORDINATE_LIMIT


class Point(NamedTuple):
    x: int
    y: int
    id: int


class Segment(NamedTuple):
    a: Point
    b: Point


class Objective(str, Enum):
    MAX = "max"
    MIN = "min"

    @property
    def sign(self) -> int:
        # Polygons are kept CCW when maximizing and CW when minimizing.
        return 1 if self is Objective.MAX else -1


class Instance(BaseModel):
    """Immutable point set. Point ids are the positions 0..n-1."""

    model_config = ConfigDict(frozen=True)

    name: str
    points: Tuple[Point, ...]

    @model_validator(mode="after")
    def _check_points(self) -> "Instance":
        if len(self.points) < 3:
            raise ValueError(f"instance {self.name!r} needs at least 3 points, got {len(self.points)}")
        seen: Dict[Tuple[int, int], int] = {}
        for index, p in enumerate(self.points):
            if p.id != index:
                raise ValueError(f"point ids must be contiguous from 0, found id {p.id} at position {index}")
            if abs(p.x) > COORDINATE_LIMIT or abs(p.y) > COORDINATE_LIMIT:
                raise ValueError(f"point {p.id} ({p.x}, {p.y}) exceeds the coordinate bound 2^30")
            if (p.x, p.y) in seen:
                raise ValueError(f"points {seen[(p.x, p.y)]} and {p.id} coincide at ({p.x}, {p.y})")
            seen[(p.x, p.y)] = p.id
        return self

    @classmethod
    def from_coordinates(cls, name: str, coords: Iterable[Sequence[int]]) -> "Instance":
        return cls(name=name, points=tuple(Point(int(x), int(y), i) for i, (x, y) in enumerate(coords)))

    @property
    def n(self) -> int:
        return len(self.points)

    @cached_property
    def xs(self) -> List[int]:
        return [p.x for p in self.points]

    @cached_property
    def ys(self) -> List[int]:
        return [p.y for p in self.points]

    @cached_property
    def xf(self) -> np.ndarray:
        return np.asarray(self.xs, dtype=np.float64)

    @cached_property
    def yf(self) -> np.ndarray:
        return np.asarray(self.ys, dtype=np.float64)

    @cached_property
    def bbox(self) -> Tuple[int, int, int, int]:
        return min(self.xs), min(self.ys), max(self.xs), max(self.ys)

    @cached_property
    def span(self) -> int:
        """Side of the bounding square; the insertion penalty measures lengths in this unit."""
        min_x, min_y, max_x, max_y = self.bbox
        return max(max_x - min_x, max_y - min_y, 1)

    @cached_property
    def exact_dtype(self):
        """int64 while doubled triangle areas fit in 64 bits, Python ints otherwise."""
        min_x, min_y, max_x, max_y = self.bbox
        return np.int64 if max(max_x - min_x, max_y - min_y) <= 2 ** 30 else object

    @cached_property
    def xi(self) -> np.ndarray:
        return np.asarray(self.xs, dtype=self.exact_dtype)

    @cached_property
    def yi(self) -> np.ndarray:
        return np.asarray(self.ys, dtype=self.exact_dtype)

    def subset(self, name: str, ids: Sequence[int]) -> Tuple["Instance", List[int]]:
        """Re-indexed sub-instance plus the local-to-global id map."""
        mapping = list(ids)
        coords = [(self.points[i].x, self.points[i].y) for i in mapping]
        return Instance.from_coordinates(name, coords), mapping
