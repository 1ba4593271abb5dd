import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from models.errors import ContractViolation
from models.instance import Instance
from utils.geometry import ids_interact
from utils.helpers import LONG_EDGE_CELLS, round_half_up

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]
EdgeKey = Tuple[int, int]


def edge_key(u: int, v: int) -> EdgeKey:
    return (u, v) if u < v else (v, u)


def grid_columns(n: int) -> int:
    return max(1, round_half_up((4 * n) ** 0.25))


class EdgeGrid:
    """
    Uniform square grid over the bounding box of the point set.

    Points are binned once. Polygon edges are registered in every cell they
    touch (closed cells), or on the long-edge list when they touch more than
    four cells. Coordinates are rescaled by the column count so that all cell
    boundaries are integers and every overlap test stays exact.
    """

    def __init__(self, xs: Sequence[int], ys: Sequence[int], ids: Optional[Iterable[int]] = None,
                 columns: Optional[int] = None):
        self.xs = xs
        self.ys = ys
        point_ids = list(range(len(xs))) if ids is None else sorted(ids)
        self.columns = columns if columns is not None else grid_columns(len(point_ids))
        self.min_x = min(xs[i] for i in point_ids)
        self.min_y = min(ys[i] for i in point_ids)
        width = max(xs[i] for i in point_ids) - self.min_x
        height = max(ys[i] for i in point_ids) - self.min_y
        # scaled coordinates: cell (i, j) is [i*span, (i+1)*span] x [j*span, (j+1)*span]
        self.span = max(width, height, 1)
        self.cell_size = self.span / self.columns
        c = self.columns
        self.sx: Dict[int, int] = {i: c * (xs[i] - self.min_x) for i in point_ids}
        self.sy: Dict[int, int] = {i: c * (ys[i] - self.min_y) for i in point_ids}

        bins: Dict[Cell, List[int]] = {}
        for i in point_ids:
            bins.setdefault(self.cell_of(i), []).append(i)
        self.point_bins: Dict[Cell, np.ndarray] = {cell: np.asarray(v, dtype=np.int64) for cell, v in bins.items()}
        self.all_points = np.asarray(point_ids, dtype=np.int64)

        self.cells: Dict[Cell, Set[EdgeKey]] = {}
        self.long_edges: Set[EdgeKey] = set()
        self.edge_cells: Dict[EdgeKey, Tuple[Cell, ...]] = {}
        self.edge_boxes: Dict[EdgeKey, Tuple[int, int, int, int]] = {}

    def cell_of(self, i: int) -> Cell:
        last = self.columns - 1
        return min(self.sx[i] // self.span, last), min(self.sy[i] // self.span, last)

    def _axis_range(self, lo: int, hi: int) -> range:
        first = lo // self.span
        if first > 0 and lo % self.span == 0:
            first -= 1
        last = min(hi // self.span, self.columns - 1)
        return range(min(first, self.columns - 1), last + 1)

    def _touches(self, ax: int, ay: int, bx: int, by: int, cell: Cell) -> bool:
        x0, y0 = cell[0] * self.span, cell[1] * self.span
        x1, y1 = x0 + self.span, y0 + self.span
        if max(ax, bx) < x0 or min(ax, bx) > x1 or max(ay, by) < y0 or min(ay, by) > y1:
            return False
        dx, dy = bx - ax, by - ay
        pos = neg = False
        for cx, cy in ((x0, y0), (x1, y0), (x1, y1), (x0, y1)):
            o = dx * (cy - ay) - dy * (cx - ax)
            if o > 0:
                pos = True
            elif o < 0:
                neg = True
            else:
                return True
        return pos and neg

    def segment_cells(self, u: int, v: int) -> List[Cell]:
        """Cells whose closed square shares a point with segment uv."""
        ax, ay, bx, by = self.sx[u], self.sy[u], self.sx[v], self.sy[v]
        out = []
        for i in self._axis_range(min(ax, bx), max(ax, bx)):
            for j in self._axis_range(min(ay, by), max(ay, by)):
                if self._touches(ax, ay, bx, by, (i, j)):
                    out.append((i, j))
        return out

    def add_edge(self, u: int, v: int) -> None:
        key = edge_key(u, v)
        if key in self.edge_cells:
            raise ContractViolation(f"edge {key} is already registered")
        cells = tuple(self.segment_cells(u, v))
        self.edge_cells[key] = cells
        xs, ys = self.xs, self.ys
        self.edge_boxes[key] = (min(xs[u], xs[v]), max(xs[u], xs[v]), min(ys[u], ys[v]), max(ys[u], ys[v]))
        if len(cells) > LONG_EDGE_CELLS:
            self.long_edges.add(key)
            return
        for cell in cells:
            self.cells.setdefault(cell, set()).add(key)

    def remove_edge(self, u: int, v: int) -> None:
        key = edge_key(u, v)
        cells = self.edge_cells.pop(key, None)
        if cells is None:
            raise ContractViolation(f"edge {key} is not registered")
        del self.edge_boxes[key]
        if key in self.long_edges:
            self.long_edges.discard(key)
            return
        for cell in cells:
            bucket = self.cells[cell]
            bucket.discard(key)
            if not bucket:
                del self.cells[cell]

    def add_polygon(self, edges: Iterable[Tuple[int, int]]) -> None:
        for u, v in edges:
            self.add_edge(u, v)

    def __contains__(self, key: EdgeKey) -> bool:
        return edge_key(*key) in self.edge_cells

    def find_interaction(self, u: int, v: int, skip: Iterable[EdgeKey] = ()) -> Optional[EdgeKey]:
        """First registered edge (not in ``skip``) interacting with segment uv, or None."""
        skip = set(skip)
        xs, ys, boxes = self.xs, self.ys, self.edge_boxes
        lo_x, hi_x = min(xs[u], xs[v]), max(xs[u], xs[v])
        lo_y, hi_y = min(ys[u], ys[v]), max(ys[u], ys[v])

        def hits(key: EdgeKey) -> bool:
            x0, x1, y0, y1 = boxes[key]
            if x1 < lo_x or x0 > hi_x or y1 < lo_y or y0 > hi_y:
                return False
            return ids_interact(xs, ys, u, v, key[0], key[1])

        for key in self.long_edges:
            if key not in skip and hits(key):
                return key
        seen: Set[EdgeKey] = set()
        for cell in self.segment_cells(u, v):
            bucket = self.cells.get(cell)
            if not bucket:
                continue
            for key in bucket:
                if key in seen or key in skip:
                    continue
                seen.add(key)
                if hits(key):
                    return key
        return None

    def any_interaction(self, u: int, v: int, skip: Iterable[EdgeKey] = ()) -> bool:
        return self.find_interaction(u, v, skip) is not None

    def neighborhood(self, cells: Iterable[Cell], kappa: Optional[int]) -> List[Cell]:
        """Non-empty point cells within Chebyshev distance kappa of any given cell (None = all)."""
        if kappa is None:
            return sorted(self.point_bins)
        last = self.columns - 1
        found: Set[Cell] = set()
        for ci, cj in cells:
            for i in range(max(0, ci - kappa), min(last, ci + kappa) + 1):
                for j in range(max(0, cj - kappa), min(last, cj + kappa) + 1):
                    if (i, j) in self.point_bins:
                        found.add((i, j))
        return sorted(found)

    def points_in_cells(self, cells: Iterable[Cell]) -> np.ndarray:
        chunks = [self.point_bins[c] for c in cells if c in self.point_bins]
        if not chunks:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate(chunks))

    def points_in_box(self, ids: Iterable[int]) -> np.ndarray:
        """Ids binned in cells overlapping the closed bounding box of the given points."""
        ids = list(ids)
        xs = [self.sx[i] for i in ids]
        ys = [self.sy[i] for i in ids]
        cells = [(i, j) for i in self._axis_range(min(xs), max(xs)) for j in self._axis_range(min(ys), max(ys))]
        return self.points_in_cells(cells)

    def candidate_points(self, u: int, v: int, kappa: Optional[int]) -> np.ndarray:
        """Sorted ids binned in the kappa-neighborhood of the cells segment uv touches."""
        if kappa is None:
            return self.all_points
        return self.points_in_cells(self.neighborhood(self.segment_cells(u, v), kappa))

    def block_cells(self, cell: Cell, kappa: int) -> List[Cell]:
        """Every grid cell within Chebyshev distance kappa of ``cell``."""
        ci, cj = cell
        last = self.columns - 1
        return [(i, j) for i in range(max(0, ci - kappa), min(last, ci + kappa) + 1)
                for j in range(max(0, cj - kappa), min(last, cj + kappa) + 1)]

    def edges_near(self, cell: Cell, kappa: Optional[int]) -> List[EdgeKey]:
        """
        Registered edges whose kappa-neighborhood contains ``cell``, sorted.

        These are exactly the edges that list the points of ``cell`` among
        their ``candidate_points``; None means every edge.
        """
        if kappa is None:
            return sorted(self.edge_cells)
        ci, cj = cell
        out = {key for key in self.long_edges
               if any(abs(i - ci) <= kappa and abs(j - cj) <= kappa for i, j in self.edge_cells[key])}
        for near in self.block_cells(cell, kappa):
            bucket = self.cells.get(near)
            if bucket:
                out |= bucket
        return sorted(out)

    def snapshot(self) -> Tuple[Dict[Cell, FrozenSet[EdgeKey]], FrozenSet[EdgeKey]]:
        return {c: frozenset(b) for c, b in self.cells.items() if b}, frozenset(self.long_edges)


def build_grid(instance: Instance) -> EdgeGrid:
    grid = EdgeGrid(instance.xs, instance.ys)
    logger.debug("[Grid] %s: %d columns, cell size %.3f", instance.name, grid.columns, grid.cell_size)
    return grid


def polygon_grid(polygon) -> EdgeGrid:
    """Grid over the polygon's vertices with all of its edges registered."""
    grid = EdgeGrid(polygon.xs, polygon.ys, ids=polygon.nxt.keys())
    grid.add_polygon(polygon.edges())
    return grid
