from __future__ import annotations

import networkx as nx
import numpy as np
import pytest

from dacperc.core.errors import ClusterEscapesBox, ConfigError
from dacperc.core.lattice import FiniteGraph, Parallelogram, Vertex, reflect
from dacperc.core.managers.stream_manager import StreamManager
from dacperc.models.dac import DacSample, SpinConfig, color, dependence_range, dependence_ranges, label_clusters
from dacperc.models.rcm.params import EdgeConfig


def _random_eta(graph: FiniteGraph, seed: int, density: float = 0.45) -> EdgeConfig:
    rng = np.random.default_rng(seed)
    return EdgeConfig(graph, (rng.random(graph.n_edges) < density).astype(np.uint8))


@pytest.mark.parametrize("seed", range(5))
def test_labeling_matches_networkx_components(seed: int) -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram.s(5, 4))
    eta = _random_eta(graph, seed)
    labeling = label_clusters(eta)

    g = nx.Graph()
    g.add_nodes_from(range(graph.n_vertices))
    g.add_edges_from((int(graph.edge_u[e]), int(graph.edge_v[e])) for e in np.flatnonzero(eta.open_mask))
    components = list(nx.connected_components(g))
    assert labeling.count == len(components)
    for component in components:
        ids = {int(labeling.ids[i]) for i in component}
        assert ids == {min(component)}
        assert labeling.sizes[min(component)] == len(component)


def test_colouring_is_constant_on_clusters_and_monotone_in_r() -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram.s(6, 6))
    sample = DacSample.draw(_random_eta(graph, 7), StreamManager(21), sample_id=3)
    previous = None
    for r in np.linspace(0.0, 1.0, 11):
        sigma = color(sample, float(r))
        for root in sample.labeling.identifiers:
            members = sample.labeling.members(int(root))
            assert len(set(sigma.spins[members].tolist())) == 1
        if previous is not None:
            assert np.all(previous.plus <= sigma.plus)
        previous = sigma
    assert not color(sample, 0.0).plus.any()
    assert color(sample, 1.0).plus.all()


def test_colour_rejects_r_outside_unit_interval() -> None:
    sample = DacSample.draw(_random_eta(FiniteGraph.triangle(), 0), StreamManager(0), 0)
    with pytest.raises(ConfigError):
        color(sample, 1.5)


def test_marks_are_deterministic_per_sample_id() -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram.s(3, 3))
    eta = _random_eta(graph, 2)
    first = DacSample.draw(eta, StreamManager(5), 8)
    again = DacSample.draw(eta, StreamManager(5), 8)
    other = DacSample.draw(eta, StreamManager(5), 9)
    assert np.array_equal(first.marks, again.marks)
    assert not np.array_equal(first.marks, other.marks)
    assert set(first.cluster_marks()) == set(first.labeling.identifiers.tolist())


def test_dependence_range(sample_factory) -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram.s(4, 4))
    sample = sample_factory(graph, [((1, 1), (2, 1)), ((2, 1), (3, 1)), ((3, 1), (3, 2))])
    assert dependence_range(sample, (1, 1)) == 2
    assert dependence_range(sample, (2, 1)) == 1
    assert dependence_range(sample, (2, 2)) == 0
    assert dependence_ranges(sample, [(3, 2)]) == {Vertex(3, 2): 2}


def test_dependence_range_raises_when_cluster_reaches_sides(sample_factory) -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram.s(4, 4))
    sample = sample_factory(graph, [((1, 1), (0, 1))])
    with pytest.raises(ClusterEscapesBox):
        dependence_range(sample, (1, 1))


def test_reflection_is_an_involution() -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram.s(3, 3))
    rng = np.random.default_rng(1)
    sigma = SpinConfig(graph, rng.choice(np.array([-1, 1], dtype=np.int8), graph.n_vertices))
    twice = sigma.reflected().reflected()
    assert np.array_equal(twice.spins, sigma.spins)
    v = Vertex(1, 3)
    assert sigma.reflected().spin_at(reflect(v)) == sigma.spin_at(v)


def test_reflection_needs_square() -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram.s(3, 2))
    with pytest.raises(ConfigError):
        SpinConfig.constant(graph, 1).reflected()


def test_rows_put_top_row_first(spins_from_rows) -> None:
    rows = ["+--", "---", "-+-"]
    sigma = spins_from_rows(Parallelogram.s(2, 2), rows)
    assert sigma.to_rows() == rows
    assert sigma.spin_at((0, 2)) == 1
    assert sigma.spin_at((1, 0)) == 1
