from __future__ import annotations

from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from dacperc.controller import exact_tables
from dacperc.core.errors import OracleCapExceeded, ZeroProbabilityCondition
from dacperc.core.lattice import FiniteGraph, Parallelogram
from dacperc.models.rcm import Event, exact_conditional_edge_prob, exact_dac_probability, exact_distribution
from dacperc.models.rcm.exact import dac_probability_ext


def _triangle_marginal(p: float, q: float) -> float:
    s = 1.0 - p
    z = s ** 3 * q ** 3 + 3 * p * s ** 2 * q ** 2 + 3 * p ** 2 * s * q + p ** 3 * q
    return (p * s ** 2 * q ** 2 + 2 * p ** 2 * s * q + p ** 3 * q) / z


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_triangle_marginals_closed_form(p: float) -> None:
    model = exact_distribution(FiniteGraph.triangle(), p)
    assert model.probs.sum() == pytest.approx(1.0)
    assert np.allclose(model.edge_marginals(), _triangle_marginal(p, 2.0))


def test_single_edge_marginal() -> None:
    model = exact_distribution(FiniteGraph.single_edge(), 0.4)
    assert model.edge_marginal(0) == pytest.approx(0.4 / 1.6)


def test_q_one_is_bernoulli_product() -> None:
    p = 0.3
    model = exact_distribution(FiniteGraph.named("S1,1"), p, q=1.0)
    assert np.allclose(model.edge_marginals(), p)
    table = model.two_edge_joint(0, 4)
    assert table[1, 1] == pytest.approx(p * p)
    assert table.sum() == pytest.approx(1.0)


def test_positive_edge_correlation_at_q_two() -> None:
    model = exact_distribution(FiniteGraph.named("S1,1"), 0.5)
    marginals = model.edge_marginals()
    for e in range(model.n_edges):
        for f in range(e + 1, model.n_edges):
            assert model.two_edge_joint(e, f)[1, 1] >= marginals[e] * marginals[f] - 1e-12


@pytest.mark.parametrize("r", [0.0, 0.25, 0.8, 1.0])
def test_single_vertex_spin_probability_is_r(r: float) -> None:
    model = exact_distribution(FiniteGraph.named("S1,1"), 0.6)
    for v in model.graph.vertices:
        assert exact_dac_probability(model, r, Event.spins_equal(model, {v: 1})) == pytest.approx(r)
    assert exact_dac_probability(model, r, None) == pytest.approx(1.0)


def test_equal_spins_from_connection_probability() -> None:
    r = 0.3
    model = exact_distribution(FiniteGraph.triangle(), 0.5)
    u, v = model.graph.vertices[0], model.graph.vertices[1]
    connected = float(model.probs[model.labels[:, 0] == model.labels[:, 1]].sum())
    equal = Event.spins_equal(model, {u: 1, v: 1}) | Event.spins_equal(model, {u: -1, v: -1})
    expected = connected + (1.0 - connected) * (r * r + (1 - r) * (1 - r))
    assert exact_dac_probability(model, r, equal) == pytest.approx(expected)


def test_conditional_edge_probability() -> None:
    model = exact_distribution(FiniteGraph.triangle(), 0.5)
    assert exact_conditional_edge_prob(model, 0.5, 0) == pytest.approx(model.edge_marginal(0))
    given_open = Event.edges_in_state(model, {1: 1, 2: 1})
    # two open edges already join all three vertices, so the third edge costs no cluster
    assert exact_conditional_edge_prob(model, 0.5, 0, given_open) == pytest.approx(0.5)
    assert model.conditional_edge_given_edges(0, {1: 1, 2: 1}) == pytest.approx(0.5)


def test_zero_probability_condition_raises() -> None:
    model = exact_distribution(FiniteGraph.triangle(), 0.5)
    impossible = Event.edges_in_state(model, {0: 1}) & Event.edges_in_state(model, {0: 0})
    with pytest.raises(ZeroProbabilityCondition):
        exact_conditional_edge_prob(model, 0.5, 1, impossible)
    with pytest.raises(ZeroProbabilityCondition):
        exact_conditional_edge_prob(model, 0.0, 1, Event.spins_equal(model, {(0, 0): 1}))


def test_edge_cap() -> None:
    with pytest.raises(OracleCapExceeded):
        exact_distribution(FiniteGraph.from_parallelogram(Parallelogram.s(3, 3)), 0.5)


def test_exact_tables_layout() -> None:
    tables = exact_tables("triangle", 0.5, r=0.5)
    assert tables["total_probability"] == pytest.approx(1.0)
    assert len(tables["edges"]) == 3
    assert len(tables["pairs"]) == 3
    assert len(tables["spins"]) == 3
    for pair in tables["pairs"]:
        cells = pair["closed_closed"] + pair["closed_open"] + pair["open_closed"] + pair["open_open"]
        assert cells == pytest.approx(1.0)


def _fraction_reference(graph: FiniteGraph, p: float, q: int = 2):
    """Exact rational weights and cluster counts, enumerated independently of the oracle."""
    edges = graph.edges()
    p_exact = Fraction(p)
    rows = []
    for config in range(1 << len(edges)):
        open_edges = [edges[i] for i in range(len(edges)) if config >> i & 1]
        g = nx.Graph()
        g.add_nodes_from(graph.vertices)
        g.add_edges_from((e.u, e.v) for e in open_edges)
        k = nx.number_connected_components(g)
        weight = p_exact ** len(open_edges) * (1 - p_exact) ** (len(edges) - len(open_edges)) * q ** k
        rows.append((config, k, weight))
    total = sum(w for _, _, w in rows)
    return [(config, k, w / total) for config, k, w in rows]


def _all_minus(reference, r: float) -> Fraction:
    return sum(prob * (1 - Fraction(r)) ** k for _, k, prob in reference)


def test_oracle_accumulates_in_extended_precision() -> None:
    model = exact_distribution(FiniteGraph.named("S1,1"), 0.5)
    assert model.probs.dtype == np.longdouble
    assert model.joint(0.5).dtype == np.longdouble
    assert isinstance(dac_probability_ext(model, 0.5, Event.whole(model)), np.longdouble)


@pytest.mark.parametrize("p", [1e-3, 0.5, 0.999])
def test_oracle_matches_rational_enumeration(p: float) -> None:
    graph = FiniteGraph.named("S1,1")
    model = exact_distribution(graph, p)
    reference = _fraction_reference(graph, p)
    for e in range(model.n_edges):
        expected = sum(prob for config, _, prob in reference if config >> e & 1)
        assert model.edge_marginal(e) == pytest.approx(float(expected), rel=1e-14)
    minus = Event.spins_equal(model, {v: -1 for v in graph.vertices})
    assert exact_dac_probability(model, 0.3, minus) == pytest.approx(float(_all_minus(reference, 0.3)), rel=1e-14)


@pytest.mark.skipif(np.finfo(np.longdouble).eps >= np.finfo(np.float64).eps,
                    reason="long double is no wider than double on this platform")
def test_small_differences_keep_extended_digits() -> None:
    graph = FiniteGraph.named("S1,1")
    model = exact_distribution(graph, 0.5)
    reference = _fraction_reference(graph, 0.5)
    minus = Event.spins_equal(model, {v: -1 for v in graph.vertices})
    lo, hi = 0.5 - 1e-4, 0.5 + 1e-4
    exact = _all_minus(reference, hi) - _all_minus(reference, lo)
    diff = dac_probability_ext(model, hi, minus) - dac_probability_ext(model, lo, minus)
    assert abs(float(diff) - float(exact)) <= 1e-13 * abs(float(exact))
