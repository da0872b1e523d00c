from __future__ import annotations

from typing import Callable, Iterable, Optional, Sequence

import numpy as np
import pytest

from dacperc.controller import SamplerSettings
from dacperc.core.lattice import FiniteGraph, Parallelogram, Vertex
from dacperc.models.dac import DacSample, SpinConfig, label_clusters
from dacperc.models.rcm.params import EdgeConfig


@pytest.fixture(autouse=True)
def _production_logging(monkeypatch) -> None:
    monkeypatch.setenv("ENV_STATUS", "production")


def build_sample(
    graph: FiniteGraph,
    open_edges: Iterable[tuple] = (),
    marks: Optional[Sequence[float]] = None,
    sample_id: int = 0,
) -> DacSample:
    """A DacSample with the listed edges open; marks are per vertex and read at each cluster identifier."""
    bits = np.zeros(graph.n_edges, dtype=np.uint8)
    for a, b in open_edges:
        bits[graph.edge_id(Vertex(*a), Vertex(*b))] = 1
    eta = EdgeConfig(graph, bits)
    labeling = label_clusters(eta)
    per_vertex = np.full(graph.n_vertices, 0.5) if marks is None else np.asarray(marks, dtype=float)
    return DacSample(eta=eta, labeling=labeling, marks=per_vertex[labeling.ids], sample_id=sample_id)


@pytest.fixture
def sample_factory() -> Callable[..., DacSample]:
    return build_sample


@pytest.fixture
def spins_from_rows() -> Callable[[Parallelogram, Sequence[str]], SpinConfig]:
    def make(region: Parallelogram, rows: Sequence[str]) -> SpinConfig:
        return SpinConfig.from_rows(FiniteGraph.from_parallelogram(region), list(rows))
    return make


@pytest.fixture
def fast_settings() -> SamplerSettings:
    return SamplerSettings(burn_in=5, thin=1, chains=2, buffer=2, threads=2, guard=1.0)
