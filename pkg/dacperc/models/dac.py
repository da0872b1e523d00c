"""
Divide-and-Colour layer: FK cluster labeling, per-cluster uniform marks, and
the colouring sigma(v) = +1 iff U(C_v) < r.

Marks are read from the mark stream at the cluster's identifier vertex, so a
single DacSample yields the whole r-family of spin configurations, pathwise
monotone in r.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional

import numpy as np

from dacperc.core.errors import ClusterEscapesBox, ConfigError
from dacperc.core.lattice import FiniteGraph, Vertex, reflect
from dacperc.core.managers.stream_manager import StreamManager
from dacperc.models.rcm.params import EdgeConfig
from dacperc.models.rcm.sampler import cluster_identifiers


@dataclass(frozen=True, eq=False)
class ClusterLabeling:
    graph: FiniteGraph
    ids: np.ndarray

    @property
    def count(self) -> int:
        return int(np.unique(self.ids).size)

    @cached_property
    def identifiers(self) -> np.ndarray:
        return np.unique(self.ids)

    @cached_property
    def sizes(self) -> Dict[int, int]:
        roots, counts = np.unique(self.ids, return_counts=True)
        return dict(zip(roots.tolist(), counts.tolist()))

    def members(self, identifier: int) -> np.ndarray:
        return np.flatnonzero(self.ids == identifier)

    def cluster_of(self, v: Vertex) -> np.ndarray:
        return self.members(int(self.ids[self.graph.index[Vertex(*v)]]))

    def same_cluster(self, v: Vertex, w: Vertex) -> bool:
        idx = self.graph.index
        return bool(self.ids[idx[Vertex(*v)]] == self.ids[idx[Vertex(*w)]])


def label_clusters(eta: EdgeConfig) -> ClusterLabeling:
    return ClusterLabeling(eta.graph, cluster_identifiers(eta.graph, eta.open_mask))


@dataclass(frozen=True, eq=False)
class SpinConfig:
    graph: FiniteGraph
    spins: np.ndarray

    def spin_at(self, v: Vertex) -> int:
        return int(self.spins[self.graph.index[Vertex(*v)]])

    @property
    def plus(self) -> np.ndarray:
        return self.spins > 0

    def to_rows(self) -> List[str]:
        """One string of +/- per row, top row first; requires a parallelogram graph."""
        region = self.graph.region
        if region is None:
            raise ConfigError("row dump needs a parallelogram graph")
        chars = np.where(self.spins > 0, "+", "-").reshape(region.height, region.width)
        return ["".join(row) for row in chars[::-1]]

    def reflected(self) -> "SpinConfig":
        """Image under (k, l) -> (l, k); only square regions map to themselves."""
        region = self.graph.region
        if region is None or not region.is_square():
            raise ConfigError("reflection needs a square parallelogram graph")
        order = np.array([self.graph.index[reflect(v)] for v in self.graph.vertices])
        return SpinConfig(self.graph, self.spins[order])

    @classmethod
    def from_rows(cls, graph: FiniteGraph, rows: List[str]) -> "SpinConfig":
        chars = np.array([list(row) for row in rows[::-1]])
        return cls(graph, np.where(chars.ravel() == "+", 1, -1).astype(np.int8))

    @classmethod
    def constant(cls, graph: FiniteGraph, spin: int) -> "SpinConfig":
        return cls(graph, np.full(graph.n_vertices, 1 if spin > 0 else -1, dtype=np.int8))


@dataclass(frozen=True, eq=False)
class DacSample:
    eta: EdgeConfig
    labeling: ClusterLabeling
    marks: np.ndarray
    sample_id: int = 0

    @classmethod
    def draw(cls, eta: EdgeConfig, stream: StreamManager, sample_id: int,
             labeling: Optional[ClusterLabeling] = None) -> "DacSample":
        labeling = labeling or label_clusters(eta)
        per_vertex = stream.cluster_marks(sample_id, eta.graph.n_vertices)
        return cls(eta=eta, labeling=labeling, marks=per_vertex[labeling.ids], sample_id=sample_id)

    @property
    def graph(self) -> FiniteGraph:
        return self.eta.graph

    def cluster_marks(self) -> Dict[int, float]:
        """identifier -> mark."""
        return {int(i): float(self.marks[i]) for i in self.labeling.identifiers}


def color(sample: DacSample, r: float) -> SpinConfig:
    if not 0.0 <= r <= 1.0:
        raise ConfigError(f"r must lie in [0, 1], got {r}")
    return SpinConfig(sample.graph, np.where(sample.marks < r, 1, -1).astype(np.int8))


def dependence_range(sample: DacSample, v: Vertex) -> int:
    """Largest lattice distance from v to a vertex of its FK cluster."""
    graph = sample.graph
    v = Vertex(*v)
    members = sample.labeling.cluster_of(v)
    if graph.region is not None and graph.outer_boundary_mask()[members].any():
        raise ClusterEscapesBox(f"FK cluster of {v} touches the box sides")
    if members.size == 1:
        return 0
    dk = graph.k[members] - v.k
    dl = graph.l[members] - v.l
    dist = np.where(dk * dl >= 0, np.maximum(np.abs(dk), np.abs(dl)), np.abs(dk) + np.abs(dl))
    return int(dist.max())


def dependence_ranges(sample: DacSample, vertices) -> Dict[Vertex, int]:
    return {Vertex(*v): dependence_range(sample, v) for v in vertices}
