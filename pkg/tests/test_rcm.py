from __future__ import annotations

import math

import numpy as np
import pytest

from dacperc.config import MIN_BUFFER
from dacperc.core.errors import ConfigError, SubcriticalityViolation
from dacperc.core.lattice import Box, FiniteGraph, Parallelogram
from dacperc.core.managers.stream_manager import StreamManager
from dacperc.models.rcm import (
    ChainState,
    RcmParams,
    check_subcriticality,
    cluster_identifiers,
    default_buffer,
    exact_distribution,
    integrated_autocorrelation_time,
    run_chain,
    sample_fk,
    spanning_flag,
    sw_sweep,
)


def test_params_relation_between_beta_and_p() -> None:
    params = RcmParams(beta=math.log(2.0))
    assert params.p == pytest.approx(0.5)
    assert RcmParams.from_p(0.3).p == pytest.approx(0.3)
    assert RcmParams(0.0).p == 0.0


@pytest.mark.parametrize("beta", [-0.1, float("inf"), float("nan")])
def test_params_reject_bad_beta(beta: float) -> None:
    with pytest.raises(ConfigError):
        RcmParams(beta)


def test_cluster_identifiers_use_smallest_vertex() -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram.s(2, 0))
    open_mask = np.zeros(graph.n_edges, dtype=bool)
    open_mask[graph.edge_id((1, 0), (2, 0))] = True
    assert cluster_identifiers(graph, open_mask).tolist() == [0, 1, 1]
    assert cluster_identifiers(graph, np.zeros(graph.n_edges, dtype=bool)).tolist() == [0, 1, 2]


def test_sweep_keeps_open_edges_between_equal_spins() -> None:
    graph = FiniteGraph.from_parallelogram(Parallelogram.s(4, 4))
    state = ChainState.cold(graph, StreamManager(3))
    params = RcmParams(0.8)
    for _ in range(20):
        sw_sweep(state, params)
        assert state.is_consistent()
    assert state.sweep == 20


def test_sweep_rejects_q_other_than_two() -> None:
    graph = FiniteGraph.triangle()
    with pytest.raises(ConfigError):
        sw_sweep(ChainState.cold(graph, StreamManager(0)), RcmParams(1.0, q=3.0))


def test_single_edge_open_frequency() -> None:
    p = 0.6
    run = run_chain(FiniteGraph.single_edge(), RcmParams.from_p(p), burn_in=10, thin=1, count=20000, seed=5)
    freq = float(np.mean([bits[0] for bits in run.results]))
    assert freq == pytest.approx(p / (2.0 - p), abs=0.02)


def test_sampler_marginals_match_exact_model() -> None:
    graph = FiniteGraph.named("S1,1")
    params = RcmParams(0.7)
    run = run_chain(graph, params, burn_in=20, thin=1, count=10000, seed=17)
    observed = np.mean(np.array(run.results, dtype=float), axis=0)
    expected = exact_distribution(graph, params.p).edge_marginals()
    assert np.allclose(observed, expected, atol=0.035)


def test_chains_are_deterministic_given_seed() -> None:
    box = Box.around(Parallelogram.s(3, 3), 2)
    first = sample_fk(box, RcmParams(0.5), burn_in=5, thin=2, count=4, seed=99)
    second = sample_fk(box, RcmParams(0.5), burn_in=5, thin=2, count=4, seed=99)
    assert [c.to_rle() for c in first] == [c.to_rle() for c in second]
    other = run_chain(box, RcmParams(0.5), burn_in=5, thin=2, count=4, seed=99, chain=1)
    assert any(not np.array_equal(a.bits, b) for a, b in zip(first, other.results))


def test_measure_callback_receives_index() -> None:
    graph = FiniteGraph.triangle()
    run = run_chain(graph, RcmParams(1.0), 3, 1, 5, seed=1, measure=lambda bonds, j: (j, int(bonds.sum())))
    assert [j for j, _ in run.results] == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("burn_in, thin, count", [(0, 1, 1), (1, 0, 1), (1, 1, -1)])
def test_schedule_validation(burn_in: int, thin: int, count: int) -> None:
    with pytest.raises(ConfigError):
        run_chain(FiniteGraph.triangle(), RcmParams(1.0), burn_in, thin, count, seed=0)


def test_autocorrelation_time_of_ar1() -> None:
    rng = np.random.default_rng(0)
    phi = 0.9
    x = np.empty(100_000)
    x[0] = 0.0
    noise = rng.standard_normal(x.size)
    for t in range(1, x.size):
        x[t] = phi * x[t - 1] + noise[t]
    assert 8.0 <= integrated_autocorrelation_time(x) <= 11.0


def test_autocorrelation_time_of_constant_series() -> None:
    assert integrated_autocorrelation_time(np.ones(50)) == 0.5


def test_spanning_flag_and_guard() -> None:
    box = Box.around(Parallelogram.s(2, 2), 2)
    graph = box.graph
    assert not spanning_flag(box, np.zeros(graph.n_edges, dtype=bool))
    assert spanning_flag(box, np.ones(graph.n_edges, dtype=bool))
    assert check_subcriticality(np.array([False] * 99 + [True])) == pytest.approx(0.01)
    with pytest.raises(SubcriticalityViolation):
        check_subcriticality(np.array([False, True]))


def test_default_buffer() -> None:
    assert default_buffer() == MIN_BUFFER
    assert default_buffer(0.05) == max(40, MIN_BUFFER)
    assert default_buffer(10.0) == MIN_BUFFER
