from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from models.errors import ContractViolation

Coords = Union[Sequence[int], Mapping[int, int]]


class Polygon:
    """
    Cyclic vertex sequence stored as a doubly linked list over point ids.

    An edge is addressed by its origin vertex ``u`` (the edge ``u -> next(u)``).
    ``doubled_area`` is twice the signed shoelace area and is updated
    incrementally by every mutation.
    """

    __slots__ = ("xs", "ys", "nxt", "prv", "doubled_area")

    def __init__(self, xs: Coords, ys: Coords, cycle: Sequence[int]):
        if len(cycle) < 3:
            raise ContractViolation(f"a polygon needs at least 3 vertices, got {len(cycle)}")
        if len(set(cycle)) != len(cycle):
            raise ContractViolation("polygon vertex ids must be distinct")
        self.xs = xs
        self.ys = ys
        self.nxt: Dict[int, int] = {}
        self.prv: Dict[int, int] = {}
        m = len(cycle)
        for i, u in enumerate(cycle):
            self.nxt[u] = cycle[(i + 1) % m]
            self.prv[u] = cycle[i - 1]
        self.doubled_area = self.shoelace()

    @classmethod
    def from_cycles(cls, xs: Coords, ys: Coords, cycles: Sequence[Sequence[int]]) -> "Polygon":
        """Union of vertex-disjoint cycles; only meaningful while cycles are being bridged together."""
        poly = cls.__new__(cls)
        poly.xs, poly.ys = xs, ys
        poly.nxt, poly.prv = {}, {}
        for cycle in cycles:
            m = len(cycle)
            for i, u in enumerate(cycle):
                if u in poly.nxt:
                    raise ContractViolation(f"vertex {u} appears in two cycles")
                poly.nxt[u] = cycle[(i + 1) % m]
                poly.prv[u] = cycle[i - 1]
        poly.doubled_area = poly.shoelace()
        return poly

    def __len__(self) -> int:
        return len(self.nxt)

    def __contains__(self, q: int) -> bool:
        return q in self.nxt

    def next(self, u: int) -> int:
        return self.nxt[u]

    def prev(self, u: int) -> int:
        return self.prv[u]

    def _cross(self, u: int, v: int) -> int:
        return self.xs[u] * self.ys[v] - self.xs[v] * self.ys[u]

    def shoelace(self) -> int:
        return sum(self._cross(u, v) for u, v in self.nxt.items())

    @property
    def orientation(self) -> int:
        return (self.doubled_area > 0) - (self.doubled_area < 0)

    def vertices(self, start: Optional[int] = None) -> List[int]:
        """Vertex cycle starting at ``start`` (default: the lowest id), following the orientation."""
        if start is None:
            start = min(self.nxt)
        out = [start]
        u = self.nxt[start]
        while u != start:
            out.append(u)
            u = self.nxt[u]
        return out

    def edges(self) -> Iterator[Tuple[int, int]]:
        for u in self.vertices():
            yield u, self.nxt[u]

    def path(self, v1: int, k: int) -> List[int]:
        out = [v1]
        for _ in range(k - 1):
            out.append(self.nxt[out[-1]])
        return out

    def copy(self) -> "Polygon":
        poly = Polygon.__new__(Polygon)
        poly.xs, poly.ys = self.xs, self.ys
        poly.nxt, poly.prv = dict(self.nxt), dict(self.prv)
        poly.doubled_area = self.doubled_area
        return poly

    def insert_delta(self, u: int, q: int) -> int:
        v = self.nxt[u]
        return self._cross(u, q) + self._cross(q, v) - self._cross(u, v)

    def insert_vertex(self, u: int, q: int) -> int:
        """Splice ``q`` into edge ``u -> next(u)``; returns the doubled-area change."""
        if q in self.nxt:
            raise ContractViolation(f"point {q} is already a vertex")
        if u not in self.nxt:
            raise ContractViolation(f"edge origin {u} is not a vertex")
        v = self.nxt[u]
        delta = self.insert_delta(u, q)
        self.nxt[u] = q
        self.prv[q] = u
        self.nxt[q] = v
        self.prv[v] = q
        self.doubled_area += delta
        return delta

    def move_delta(self, path: Sequence[int], u1: int) -> int:
        """Doubled-area change of moving ``path`` (reversed) onto edge ``u1 -> next(u1)``."""
        v1, vk = path[0], path[-1]
        a, b = self.prv[v1], self.nxt[vk]
        u2 = self.nxt[u1]
        inner = 0
        for i in range(len(path) - 1):
            inner += self._cross(path[i], path[i + 1])
        return (self._cross(a, b) - self._cross(a, v1) - self._cross(vk, b) - 2 * inner
                + self._cross(u1, vk) + self._cross(v1, u2) - self._cross(u1, u2))

    def check_move(self, path: Sequence[int], u1: int) -> None:
        if len(self.nxt) - len(path) < 3:
            raise ContractViolation("moving the path would leave fewer than 3 vertices")
        members = set(path)
        for i in range(len(path) - 1):
            if self.nxt[path[i]] != path[i + 1]:
                raise ContractViolation(f"path {list(path)} is not contiguous")
        u2 = self.nxt.get(u1)
        if u2 is None or u1 in members or u2 in members:
            raise ContractViolation(f"edge ({u1}, {u2}) overlaps the moved path")

    def move_path(self, path: Sequence[int], u1: int) -> int:
        """Remove ``path``, join its outer neighbours, splice it reversed into ``u1 -> next(u1)``."""
        self.check_move(path, u1)
        delta = self.move_delta(path, u1)
        v1, vk = path[0], path[-1]
        a, b = self.prv[v1], self.nxt[vk]
        u2 = self.nxt[u1]
        self.nxt[a] = b
        self.prv[b] = a
        for v in path:
            self.nxt[v], self.prv[v] = self.prv[v], self.nxt[v]
        self.nxt[u1] = vk
        self.prv[vk] = u1
        self.nxt[v1] = u2
        self.prv[u2] = v1
        self.doubled_area += delta
        return delta

    def splice_bridge(self, a: int, b: int, c: int, d: int) -> int:
        """Replace edges ``a -> b`` and ``c -> d`` (of two different cycles) by ``a -> d`` and ``c -> b``."""
        if self.nxt.get(a) != b or self.nxt.get(c) != d:
            raise ContractViolation(f"({a}, {b}) and ({c}, {d}) must both be current edges")
        delta = self._cross(a, d) + self._cross(c, b) - self._cross(a, b) - self._cross(c, d)
        self.nxt[a] = d
        self.prv[d] = a
        self.nxt[c] = b
        self.prv[b] = c
        self.doubled_area += delta
        return delta


def insert_vertex(polygon: Polygon, edge_origin: int, q: int) -> Polygon:
    polygon.insert_vertex(edge_origin, q)
    return polygon
