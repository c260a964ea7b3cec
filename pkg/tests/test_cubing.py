import json
from fractions import Fraction as F

import numpy as np
import pytest

from dualcube import cubing as C
from dualcube import walls2d as W
from dualcube.errors import BudgetExceeded, DegenerateSegment, FrontierClipped, IncompleteGraph
from dualcube.pocset import (build_pocset, delta, free_pocset, hid, is_isomorphic, max_transverse,
                             roller_chain_example, star_tree_example)
from dualcube.analysis import sample_generic_points
from conftest import arrangement, graph


def test_triangle_graph():
    G = graph("triangle")
    assert (G.n_vertices, G.n_edges) == (8, 12)
    assert G.complete and int((~G.consistent).sum()) == 1
    v = int(np.flatnonzero(~G.consistent)[0])
    assert C.vertex_degree(G, v) == 3
    cubes = C.cubes_at(G, v)
    assert len(cubes) == 1 and cubes[0].dim == 3


def test_free_pocset_is_a_cube():
    for n in range(1, 6):
        G = C.enumerate_pi(free_pocset(n))
        assert G.n_vertices == 2 ** n and G.n_edges == n * 2 ** (n - 1)
        assert G.consistent is None
        assert C.complex_dimension(G) == n


def test_hex_counts():
    for N in (1, 2):
        A = arrangement("hex", N)
        G = graph("hex", N)
        assert G.n_vertices == (2 * N + 2) ** 3
        assert int(G.consistent.sum()) == len(A.chambers)
        assert C.complex_dimension(G) == 3


def test_star_tree_degree():
    G = C.enumerate_pi(star_tree_example(5))
    degs = [C.vertex_degree(G, v) for v in range(G.n_vertices)]
    assert max(degs) == 5 and C.complex_dimension(G) == 1


def test_roller_chain_dimension_grows():
    dims = [C.complex_dimension(C.enumerate_pi(roller_chain_example(n))) for n in range(1, 5)]
    assert dims == [1, 2, 3, 4]


def test_geodesic_lengths():
    G = graph("hex", 2)
    rng = np.random.default_rng(0)
    for _ in range(500):
        a, b = (int(x) for x in rng.integers(0, G.n_vertices, 2))
        path = C.geodesic(G, G.bits[a], G.bits[b])
        assert len(path) - 1 == delta(G.P, G.bits[a], G.bits[b])
        assert path[0] == a and path[-1] == b
        for u, v in zip(path, path[1:]):
            assert v in G.neighbors(u)


def test_geodesic_tie_break_on_square():
    G = C.enumerate_pi(free_pocset(2))
    a = np.array([0, 0], dtype=np.uint8)
    path = C.geodesic(G, a, np.array([1, 1], dtype=np.uint8))
    assert [G.bits[v].tolist() for v in path] == [[0, 0], [1, 0], [1, 1]]
    assert C.geodesic(G, a, a) == [G.vertex(a)]


def test_consistent_geodesic_grid():
    A = arrangement("grid", 4)
    G = graph("grid", 4)
    path = C.consistent_geodesic(A, G, (F(1, 2), F(1, 2)), (F(5, 2), F(1, 2)))
    assert len(path) == 3 and G.consistent[path].all()
    assert C.consistent_geodesic(A, G, (F(1, 2), F(1, 2)), (F(1, 3), F(2, 3))) == [G.vertex(W.choice_at(A, (F(1, 2), F(1, 2))))]
    with pytest.raises(DegenerateSegment):
        C.consistent_geodesic(A, G, (F(1), F(0)), (F(1), F(1, 2)))


def test_consistent_geodesic_hex():
    A = arrangement("hex", 2)
    G = graph("hex", 2)
    rng = np.random.default_rng(3)
    pts = sample_generic_points(A, 400, rng)
    for a, b in zip(pts[0::2], pts[1::2]):
        path = C.consistent_geodesic(A, G, a, b)
        assert G.consistent[path].all()
        assert len(path) - 1 == delta(G.P, W.choice_at(A, a), W.choice_at(A, b))


def test_cube_closure_hex():
    G = graph("hex", 2)
    for v in range(0, G.n_vertices, 7):
        for cube in C.cubes_at(G, v):
            corners = C.cube_corners(G, cube)
            assert -1 not in corners
            for i, u in enumerate(corners):
                for j, w in enumerate(corners):
                    assert delta(G.P, G.bits[u], G.bits[w]) == bin(i ^ j).count("1")


def test_dimension_matches_max_transverse():
    for P in (roller_chain_example(3), star_tree_example(4), arrangement("grid", 3).pocset):
        assert C.complex_dimension(C.enumerate_pi(P)) == max_transverse(P).size


def test_hyperplane_dual_roundtrip():
    chain = build_pocset(2, [(hid(0), hid(1))])
    Q = C.hyperplane_dual(C.enumerate_pi(chain))
    assert Q == chain and Q.leq[hid(0), hid(1)]
    for P in (free_pocset(2), arrangement("triangle").pocset, arrangement("grid", 2).pocset,
              arrangement("hex", 1).pocset, roller_chain_example(3)):
        assert is_isomorphic(P, C.hyperplane_dual(C.enumerate_pi(P))) is not None


def test_budget():
    A = arrangement("hex", 2)
    with pytest.raises(BudgetExceeded) as exc:
        C.enumerate_arrangement(A, max_vertices=50)
    G = exc.value.graph
    assert G.n_vertices == 50 and not G.complete
    with pytest.raises(IncompleteGraph):
        C.hyperplane_dual(G)
    clipped = int(np.flatnonzero(~G.expanded)[0])
    with pytest.raises(FrontierClipped):
        C.cubes_at(G, clipped)
    G = C.enumerate_arrangement(A, max_radius=2, strict=False)
    assert G.level.max() == 2 and not G.complete


def test_empty_budget_export_is_header_only():
    G = C.enumerate_arrangement(arrangement("triangle"), max_vertices=0, strict=False)
    doc = json.loads(C.export_graph(G, "json"))
    assert doc["nodes"] == [] and doc["edges"] == [] and doc["complete"] is False
    dot = C.export_graph(G, "dot").decode().splitlines()
    assert dot[0].startswith("graph") and dot[-1] == "}" and len(dot) == 3


def test_export_is_deterministic():
    a = C.export_graph(C.enumerate_arrangement(W.arrangement_triangle()), "dot")
    b = C.export_graph(C.enumerate_arrangement(W.arrangement_triangle()), "dot")
    assert a == b
    assert a.decode().count(" -- ") == 12
    G = graph("hex", 1)
    doc = json.loads(C.export_graph(G, "json"))
    assert len(doc["nodes"]) == 64
    assert np.array_equal(C.graph_from_json(G.P, doc), G.bits)
    with pytest.raises(ValueError):
        C.export_graph(G, "png")

