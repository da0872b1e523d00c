from __future__ import annotations

import numpy as np
import pytest

from dacperc.controller import lemma_suite
from dacperc.core.lattice import FiniteGraph
from dacperc.models.rcm import exact_distribution, run_suite, sequential_monotone_coupling
from dacperc.models.rcm.lemmas import (
    boundary_edges,
    check_barrier_increase,
    check_conditional_independence,
    check_coupling_order,
    check_edge_dominance,
    check_p_monotonicity,
    check_strong_fkg,
    connected_vertex_sets,
)

GRAPHS = ["triangle", "S1,1"]


@pytest.fixture(params=GRAPHS)
def model(request):
    return exact_distribution(FiniteGraph.named(request.param), 0.5)


def test_connected_vertex_sets_of_triangle() -> None:
    sets = connected_vertex_sets(FiniteGraph.triangle())
    assert len(sets) == 7


def test_boundary_edges_of_corner() -> None:
    graph = FiniteGraph.named("S1,1")
    corner = graph.index[(1, 0)]
    assert len(boundary_edges(graph, [corner])) == 2
    assert boundary_edges(graph, range(graph.n_vertices)) == []


def test_strong_fkg(model) -> None:
    report = check_strong_fkg(model, "g")
    assert report.instances > 0
    assert report.passed


@pytest.mark.parametrize("with_closed", [False, True])
def test_edge_dominance(model, with_closed: bool) -> None:
    report = check_edge_dominance(model, 0.5, with_closed)
    assert report.instances > 0
    assert report.passed, report.worst


@pytest.mark.parametrize("exterior_only", [False, True])
def test_barrier_increase(model, exterior_only: bool) -> None:
    report = check_barrier_increase(model, 0.5, exterior_only)
    assert report.passed, report.worst


def test_conditional_independence(model) -> None:
    report = check_conditional_independence(model, 0.5)
    assert report.instances > 0
    assert report.passed


def test_coupling_order(model) -> None:
    assert check_coupling_order(model, 0.5, trials=5).passed


def test_coupling_reveals_every_edge_once() -> None:
    model = exact_distribution(FiniteGraph.named("S1,1"), 0.7)
    rng = np.random.default_rng(4)
    result = sequential_monotone_coupling(model, 0.4, [0, 1], rng.random(model.n_edges))
    assert sorted(result.order) == list(range(model.n_edges))
    assert result.ordered


def test_p_monotonicity() -> None:
    report = check_p_monotonicity(FiniteGraph.named("S1,1"), p_grid=[0.1, 0.4, 0.7])
    assert report.instances == 10
    assert report.passed


def test_report_records_failures() -> None:
    model = exact_distribution(FiniteGraph.triangle(), 0.5)
    report = check_strong_fkg(model, "triangle", tol=-1.0)
    assert not report.passed
    assert report.to_record()["violations"] == report.violations


@pytest.mark.slow
def test_full_suite_passes(capsys) -> None:
    reports = lemma_suite()
    assert all(rep.passed for rep in reports)
    assert "checks passed" in capsys.readouterr().out


def test_suite_is_deterministic_in_seed() -> None:
    first = [r.to_record() for r in run_suite(["triangle"], [0.5], [0.5], seed=3)]
    second = [r.to_record() for r in run_suite(["triangle"], [0.5], [0.5], seed=3)]
    assert first == second
