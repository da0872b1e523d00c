import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from dacperc.core.errors import ConfigError
from dacperc.core.helpers import rle_bits
from dacperc.core.lattice import FiniteGraph
from dacperc.core.managers.stream_manager import StreamManager


@dataclass(frozen=True)
class RcmParams:
    """Random-cluster parameters; p = 1 - exp(-beta)."""
    beta: float
    q: float = 2.0

    def __post_init__(self):
        if not (self.beta >= 0.0 and math.isfinite(self.beta)):
            raise ConfigError(f"beta must be finite and >= 0, got {self.beta}")
        if self.q <= 0.0:
            raise ConfigError(f"q must be > 0, got {self.q}")

    @classmethod
    def from_p(cls, p: float, q: float = 2.0) -> "RcmParams":
        if not 0.0 <= p < 1.0:
            raise ConfigError(f"p must lie in [0, 1), got {p}")
        return cls(beta=-math.log1p(-p), q=q)

    @property
    def p(self) -> float:
        return -math.expm1(-self.beta)


@dataclass(frozen=True, eq=False)
class EdgeConfig:
    """One open/closed bit per edge of `graph`, in the graph's edge order."""
    graph: FiniteGraph
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.shape != (self.graph.n_edges,):
            raise ValueError("edge bit vector does not match the graph")

    @property
    def open_mask(self) -> np.ndarray:
        return self.bits.astype(bool)

    def open_count(self) -> int:
        return int(self.bits.sum())

    def to_rle(self) -> str:
        return rle_bits(self.bits)


@dataclass(eq=False)
class ChainState:
    graph: FiniteGraph
    spins: np.ndarray
    bonds: np.ndarray
    stream: StreamManager
    chain: int = 0
    sweep: int = 0

    @classmethod
    def cold(cls, graph: FiniteGraph, stream: StreamManager, chain: int = 0) -> "ChainState":
        """All spins +1, all edges closed."""
        return cls(
            graph=graph,
            spins=np.ones(graph.n_vertices, dtype=np.int8),
            bonds=np.zeros(graph.n_edges, dtype=bool),
            stream=stream,
            chain=chain,
        )

    def edge_config(self) -> EdgeConfig:
        return EdgeConfig(self.graph, self.bonds.astype(np.uint8))

    def is_consistent(self) -> bool:
        """No open edge joins opposite spins."""
        g = self.graph
        return not np.any(self.bonds & (self.spins[g.edge_u] != self.spins[g.edge_v]))
