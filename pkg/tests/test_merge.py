import random

import pytest

from agents.merge_agent import (
    Bridge,
    BridgeIndex,
    assign_cells,
    best_bridge,
    cell_index,
    compute_bridges,
    merge_all,
    partition_solve,
    prim_tree,
    solve_cell,
)
from models.errors import MergeFailure
from models.instance import Instance, Objective
from models.params import SolveParams
from models.polygon import Polygon
from utils.geometry import shoelace2
from utils.verification import is_simple_naive, score


def notched_square(x0, y0):
    return [(x0, y0), (x0 + 100, y0), (x0 + 100, y0 + 100), (x0, y0 + 100), (x0 + 50, y0 + 30)]


def test_cell_index_uses_exact_integer_cells():
    instance = Instance.from_coordinates("cells", [(0, 0), (499, 0), (500, 0), (1000, 1000), (250, 750)])
    cells = cell_index(instance, 2)
    assert cells == {(0, 0): [0, 1], (1, 0): [2], (1, 1): [3], (0, 1): [4]}


def test_degenerate_cells_fold_into_nearest_solid_cell():
    coords = notched_square(0, 0) + [(900, 0), (1000, 50)]
    instance = Instance.from_coordinates("fold", coords)
    assert assign_cells(instance, 2) == {(0, 0): list(range(7))}


def test_two_clusters_give_two_cell_polygons():
    coords = notched_square(0, 0) + notched_square(900, 0)
    instance = Instance.from_coordinates("pair", coords)
    partition = partition_solve(instance, SolveParams(), g=2)
    assert partition.order() == [(0, 0), (1, 0)]
    assert sorted(partition.polygons[(0, 0)].vertices()) == [0, 1, 2, 3, 4]
    assert sorted(partition.polygons[(1, 0)].vertices()) == [5, 6, 7, 8, 9]
    merged = merge_all(partition, Objective.MAX)
    report = score(merged, instance, naive=True)
    assert report.valid


@pytest.mark.parametrize("objective", list(Objective))
def test_bridge_adds_quad_area(objective):
    xs = [0, 2, 1, 10, 12, 11]
    ys = [0, 0, 2, 0, 0, 2]
    first, second = ([0, 1, 2], [3, 4, 5]) if objective is Objective.MAX else ([0, 2, 1], [3, 5, 4])
    p1 = Polygon(xs, ys, first)
    p2 = Polygon(xs, ys, second)
    bridge = best_bridge(p1, p2, objective)
    assert bridge is not None
    assert objective.sign * bridge.delta > 0
    merged = Polygon.from_cycles(xs, ys, [p1.vertices(), p2.vertices()])
    merged.splice_bridge(*bridge.source, *bridge.target)
    assert merged.doubled_area == p1.doubled_area + p2.doubled_area + bridge.delta
    assert merged.doubled_area == shoelace2(xs, ys, merged.vertices())
    assert is_simple_naive(xs, ys, merged.vertices())
    assert objective.sign * merged.doubled_area > 0


def test_nested_polygon_has_no_bridge():
    xs = [0, 100, 100, 0, 40, 60, 50]
    ys = [0, 0, 100, 100, 40, 40, 60]
    outer = Polygon(xs, ys, [0, 1, 2, 3])
    inner = Polygon(xs, ys, [4, 5, 6])
    assert best_bridge(outer, inner, Objective.MAX) is None


def test_used_edge_is_not_bridged_twice():
    xs = [0, 2, 1, 10, 12, 11]
    ys = [0, 0, 2, 0, 0, 2]
    p1 = Polygon(xs, ys, [0, 1, 2])
    p2 = Polygon(xs, ys, [3, 4, 5])
    index = BridgeIndex(xs, ys, (p1, p2))
    first = best_bridge(p1, p2, Objective.MAX, index)
    index.accept(first)
    second = best_bridge(p1, p2, Objective.MAX, index)
    assert second is None or (second.source != first.source and second.target != first.target)


@pytest.mark.parametrize("objective", list(Objective))
def test_two_by_two_grid_merges_through_spanning_tree(objective):
    coords = notched_square(0, 0) + notched_square(900, 0) + notched_square(0, 900) + notched_square(900, 900)
    instance = Instance.from_coordinates("quad", coords)
    partition = partition_solve(instance, SolveParams(objective=objective), g=2)
    order = partition.order()
    assert order == [(0, 0), (1, 0), (0, 1), (1, 1)]
    bridges = compute_bridges(partition, objective)
    assert len(bridges) >= 3
    tree = prim_tree(order, bridges, objective)
    assert len(tree) == 3
    merged = merge_all(partition, objective)
    cells_area = sum(partition.polygons[c].doubled_area for c in order)
    assert merged.doubled_area == cells_area + sum(b.delta for b in tree)
    assert merged.doubled_area == shoelace2(instance.xs, instance.ys, merged.vertices())
    report = score(merged, instance, naive=True)
    assert report.valid


def test_diagonal_cells_cannot_be_connected():
    coords = notched_square(0, 0) + notched_square(900, 900)
    instance = Instance.from_coordinates("diagonal", coords)
    partition = partition_solve(instance, SolveParams(), g=2)
    with pytest.raises(MergeFailure) as info:
        merge_all(partition, Objective.MAX)
    assert info.value.components == [[(0, 0)], [(1, 1)]]


def test_single_cell_is_a_plain_solve(random_instance):
    instance = random_instance(40, seed=6, extent=500)
    params = SolveParams()
    partition = partition_solve(instance, params, g=1)
    merged = merge_all(partition, Objective.MAX)
    assert merged.vertices() == solve_cell(instance, params).vertices()


def kruskal(cells, bridges, objective):
    parent = {c: c for c in cells}

    def find(c):
        while parent[c] != c:
            c = parent[c]
        return c

    chosen = []
    weight = (lambda b: -b.area2) if objective is Objective.MAX else (lambda b: b.area2)
    for k in sorted(range(len(bridges)), key=lambda k: (weight(bridges[k]), k)):
        x, y = find(bridges[k].cells[0]), find(bridges[k].cells[1])
        if x != y:
            parent[x] = y
            chosen.append(bridges[k])
    return chosen


@pytest.mark.parametrize("objective", list(Objective))
def test_prim_matches_kruskal(objective):
    rng = random.Random(17)
    cells = [(i, j) for j in range(3) for i in range(3)]
    areas = rng.sample(range(1, 10_000), 12)
    bridges = []
    for (i, j) in cells:
        for step in ((1, 0), (0, 1)):
            other = (i + step[0], j + step[1])
            if other in cells:
                delta = areas.pop() * objective.sign
                bridges.append(Bridge(source=(len(bridges), 0), target=(0, len(bridges)), cells=((i, j), other), delta=delta))
    tree = prim_tree(cells, bridges, objective)
    assert len(tree) == 8
    assert set(tree) == set(kruskal(cells, bridges, objective))


def test_prim_reports_components():
    cells = [(0, 0), (1, 0), (0, 1), (1, 1)]
    bridges = [Bridge(source=(0, 1), target=(2, 3), cells=((0, 0), (1, 0)), delta=5)]
    with pytest.raises(MergeFailure) as info:
        prim_tree(cells, bridges, Objective.MAX)
    assert info.value.components == [[(0, 0), (1, 0)], [(0, 1)], [(1, 1)]]
