from __future__ import annotations

import math

import networkx as nx
import numpy as np
import pytest

from dacperc.core.errors import LatticeError
from dacperc.core.lattice import (
    Box,
    FiniteGraph,
    Parallelogram,
    Vertex,
    are_adjacent,
    ball,
    classify_barrier,
    edge_boundary,
    embed,
    graph_distance,
    lattice_distance,
    make_edge,
    neighbors,
    reflect,
    sphere,
    vertex_boundary,
)


def test_neighbors_on_infinite_lattice() -> None:
    assert set(neighbors(Vertex(0, 0))) == {(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)}


def test_neighbors_truncated_at_corner() -> None:
    assert set(neighbors(Vertex(0, 0), Parallelogram.s(2, 2))) == {(1, 0), (0, 1), (1, 1)}


def test_neighbor_relation_is_symmetric() -> None:
    region = Parallelogram.s(3, 3)
    for v in region:
        for w in neighbors(v, region):
            assert v in neighbors(w, region)


def test_adjacency_matches_unit_embedding_distance() -> None:
    vertices = list(Parallelogram(-2, 2, -2, 2))
    for v in vertices:
        for w in vertices:
            (x1, y1), (x2, y2) = embed(v), embed(w)
            unit = math.isclose(math.hypot(x1 - x2, y1 - y2), 1.0, abs_tol=1e-12)
            assert are_adjacent(v, w) == unit


def test_embedding_examples() -> None:
    assert embed(Vertex(0, 0)) == (0.0, 0.0)
    x, y = embed(Vertex(0, 1))
    assert x == pytest.approx(-0.5) and y == pytest.approx(math.sqrt(3) / 2)
    x, y = embed(Vertex(2, 3))
    assert x == pytest.approx(0.5) and y == pytest.approx(3 * math.sqrt(3) / 2)


def test_graph_distance_examples() -> None:
    assert graph_distance(Vertex(0, 0), Vertex(0, 0)) == 0
    assert graph_distance(Vertex(0, 0), Vertex(1, 1)) == 1
    assert graph_distance(Vertex(0, 0), Vertex(2, 1)) == 2


def test_closed_form_distance_matches_bfs() -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram(-4, 4, -4, 4))
    lengths = nx.single_source_shortest_path_length(graph.to_networkx(), Vertex(0, 0))
    for w, d in lengths.items():
        assert lattice_distance(Vertex(0, 0), w) == d


def test_ball_sizes() -> None:
    assert ball(Vertex(0, 0), 0) == {Vertex(0, 0)}
    assert len(ball(Vertex(0, 0), 1)) == 7
    assert len(ball(Vertex(3, -1), 2)) == 19


def test_vertex_boundary_of_ball_is_sphere() -> None:
    v = Vertex(1, 2)
    assert vertex_boundary(ball(v, 2)) == sphere(v, 2)
    assert vertex_boundary({v}) == {v}


def test_vertex_boundary_of_box_is_its_sides() -> None:
    region = Parallelogram.s(3, 2)
    assert vertex_boundary(region) == {v for v in region if region.on_sides(v)}


def test_edge_boundary_counts() -> None:
    assert len(edge_boundary({Vertex(0, 0)})) == 6
    assert len(edge_boundary({Vertex(0, 0), Vertex(1, 0)})) == 10


def test_edge_boundary_agrees_with_vertex_boundary() -> None:
    A = ball(Vertex(0, 0), 2) | {Vertex(3, 0)}
    inner = vertex_boundary(A)
    for e in edge_boundary(A):
        assert (e.u in A) != (e.v in A)
        assert (e.u if e.u in A else e.v) in inner


def test_classify_barrier_examples() -> None:
    assert not classify_barrier(set()).is_barrier
    v = Vertex(0, 0)
    star = {make_edge(v, w) for w in neighbors(v)}
    result = classify_barrier(star)
    assert result.is_barrier
    assert result.interior == {v}


def _random_connected_set(rng: np.random.Generator, size: int) -> set:
    A = {Vertex(0, 0)}
    while len(A) < size:
        frontier = sorted({w for v in A for w in neighbors(v)} - A)
        A.add(frontier[int(rng.integers(len(frontier)))])
    return A


def test_edge_boundary_of_connected_set_is_a_barrier() -> None:
    rng = np.random.default_rng(11)
    for _ in range(40):
        A = _random_connected_set(rng, int(rng.integers(1, 15)))
        result = classify_barrier(edge_boundary(A))
        assert result.is_barrier
        assert A <= result.interior
        assert not (A & result.exterior)


def test_barrier_touching_box_sides_is_rejected() -> None:
    box = Parallelogram.s(3, 3)
    corner = Vertex(0, 0)
    edges = {make_edge(corner, w) for w in neighbors(corner, box)}
    assert not classify_barrier(edges, box).is_barrier


def test_barrier_with_one_edge_on_box_side_is_rejected() -> None:
    box = Box.around(Parallelogram.s(4, 4), 2)
    center = Vertex(4, 4)
    star = {make_edge(center, w) for w in neighbors(center)}
    inside = classify_barrier(star, box)
    assert inside.is_barrier
    assert inside.interior == {center}

    side_edge = make_edge(Vertex(-2, 0), Vertex(-2, 1))
    result = classify_barrier(star | {side_edge}, box)
    assert not result.is_barrier
    assert "boundary" in result.reason


def test_reflection_is_an_automorphism_of_square() -> None:
    region = Parallelogram.s(3, 3)
    graph = FiniteGraph.from_parallelogram(region)
    for e in graph.edges():
        assert reflect(e.u) in region and reflect(e.v) in region
        assert are_adjacent(reflect(e.u), reflect(e.v))
    assert {reflect(v) for v in region.left()} == set(region.bottom())


def test_parallelogram_literals() -> None:
    assert Parallelogram.parse("S0,2,0,3") == Parallelogram.s(2, 3)
    assert Parallelogram.parse("S 2 3") == Parallelogram.s(2, 3)
    assert Parallelogram.parse(Parallelogram(-1, 2, 3, 5).literal()) == Parallelogram(-1, 2, 3, 5)
    with pytest.raises(LatticeError):
        Parallelogram.parse("T1,2")


def test_box_requires_buffer_depth() -> None:
    with pytest.raises(LatticeError):
        Box(Parallelogram.s(4, 4), 2, Parallelogram(1, 3, 1, 3))
    box = Box.around(Parallelogram.s(2, 2), 3)
    assert box.outer == Parallelogram(-3, 5, -3, 5)


def test_finite_graph_edge_counts() -> None:
    graph = FiniteGraph.named("S1,1")
    assert graph.n_vertices == 4
    assert graph.n_edges == 5
    assert FiniteGraph.named("triangle").n_edges == 3
    assert FiniteGraph.from_parallelogram(Parallelogram.s(3, 3)).n_edges == 33


def test_region_view_sides() -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram(-1, 3, -1, 3))
    view = graph.view(Parallelogram.s(2, 2))
    assert view.mask.sum() == 9
    assert {graph.vertices[i] for i in np.flatnonzero(view.left)} == {(0, 0), (0, 1), (0, 2)}
    assert {graph.vertices[i] for i in np.flatnonzero(view.top)} == {(0, 2), (1, 2), (2, 2)}
