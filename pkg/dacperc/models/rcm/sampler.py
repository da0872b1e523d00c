"""
Swendsen-Wang dynamics for the q = 2 random-cluster measure on a finite box
with free boundary.

One sweep alternates the two Edwards-Sokal conditionals: bonds are opened on
equal-spin edges with probability p, then every FK cluster gets a fresh
symmetric spin. The DaC colouring parameter r never enters the chain.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from dacperc.config import GUARD_SPAN_FRACTION, MIN_BUFFER
from dacperc.core.errors import ConfigError, SubcriticalityViolation
from dacperc.core.lattice import Box, FiniteGraph
from dacperc.core.managers.stream_manager import StreamManager
from dacperc.models.rcm.params import ChainState, EdgeConfig, RcmParams


def cluster_identifiers(graph: FiniteGraph, open_mask: np.ndarray) -> np.ndarray:
    """For every vertex, the index of the lexicographically smallest vertex of its FK cluster."""
    n = graph.n_vertices
    if not open_mask.any():
        return np.arange(n, dtype=np.int64)
    n_components, labels = connected_components(graph.adjacency(open_mask), directed=False)
    roots = np.full(n_components, n, dtype=np.int64)
    np.minimum.at(roots, labels, np.arange(n, dtype=np.int64))
    return roots[labels]


def sw_sweep(state: ChainState, params: RcmParams) -> ChainState:
    if params.q != 2.0:
        raise ConfigError("Swendsen-Wang dynamics is implemented for q = 2 only")
    g = state.graph
    u_edge, u_vertex = state.stream.sweep_uniforms(state.chain, state.sweep, g.n_edges, g.n_vertices)

    equal = state.spins[g.edge_u] == state.spins[g.edge_v]
    state.bonds = equal & (u_edge < params.p)

    ids = cluster_identifiers(g, state.bonds)
    state.spins = np.where(u_vertex[ids] < 0.5, 1, -1).astype(np.int8)
    state.sweep += 1
    return state


def integrated_autocorrelation_time(series, window_factor: float = 5.0) -> float:
    """tau_int = 1/2 + sum of autocorrelations, truncated at the first W >= window_factor * tau(W)."""
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 4:
        return 0.5
    x = x - x.mean()
    var = float(np.dot(x, x)) / n
    if var <= 0.0:
        return 0.5
    spectrum = np.fft.rfft(x, n=2 * n)
    acf = np.fft.irfft(spectrum * np.conjugate(spectrum))[:n] / (var * n)
    taus = 0.5 + np.cumsum(acf[1:])
    windows = np.arange(1, n)
    ok = windows >= window_factor * taus
    if not ok.any():
        return float(taus[-1])
    return float(taus[np.argmax(ok)])


@dataclass
class ChainRun:
    chain: int
    results: List[Any]
    density_trace: np.ndarray
    tau_int: float
    thin: int
    spanning: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    @property
    def thin_warning(self) -> bool:
        return self.thin < self.tau_int

    def diagnostics(self) -> dict:
        return {
            "chain": self.chain,
            "tau_int": self.tau_int,
            "thin": self.thin,
            "thin_warning": self.thin_warning,
            "spanning_fraction": float(self.spanning.mean()) if self.spanning.size else 0.0,
        }


def spanning_flag(box: Box, open_mask: np.ndarray, ids: Optional[np.ndarray] = None) -> bool:
    """True when some FK cluster touches both the inner window and the box sides."""
    if box.buffer == 0:
        return False
    graph = box.graph
    if ids is None:
        ids = cluster_identifiers(graph, open_mask)
    inner_ids = np.unique(ids[graph.view(box.inner).mask])
    side_ids = np.unique(ids[graph.outer_boundary_mask()])
    return bool(np.intersect1d(inner_ids, side_ids, assume_unique=True).size)


def check_subcriticality(flags: np.ndarray, threshold: float = GUARD_SPAN_FRACTION):
    fraction = float(np.mean(flags)) if np.size(flags) else 0.0
    if fraction > threshold:
        raise SubcriticalityViolation(
            f"{fraction:.2%} of samples have an FK cluster spanning the buffer "
            f"(limit {threshold:.2%}); beta is too close to critical or the buffer is too thin"
        )
    return fraction


def default_buffer(psi_hat: Optional[float] = None) -> int:
    """max(ceil(2 / psi_hat), MIN_BUFFER)."""
    if psi_hat is None or not psi_hat > 0.0 or not math.isfinite(psi_hat):
        return MIN_BUFFER
    return max(math.ceil(2.0 / psi_hat), MIN_BUFFER)


def _validate_schedule(burn_in: int, thin: int, count: int):
    if burn_in < 1 or thin < 1:
        raise ConfigError("burn_in and thin must both be >= 1")
    if count < 0:
        raise ConfigError("count must be >= 0")


def run_chain(
    domain: Union[Box, FiniteGraph],
    params: RcmParams,
    burn_in: int,
    thin: int,
    count: int,
    seed: int,
    chain: int = 0,
    measure: Optional[Callable[[np.ndarray, int], Any]] = None,
) -> ChainRun:
    """
    Run one chain from a cold start. After burn_in sweeps, every thin-th
    configuration is passed to measure(open_mask, index) and the return
    values are collected; without measure the edge bit vectors are kept.
    """
    _validate_schedule(burn_in, thin, count)
    box = domain if isinstance(domain, Box) else None
    graph = box.graph if box is not None else domain
    state = ChainState.cold(graph, StreamManager(seed), chain)

    for _ in range(burn_in):
        sw_sweep(state, params)

    results: List[Any] = []
    density = np.empty(count * thin, dtype=float)
    spanning = np.zeros(count, dtype=bool)
    m = max(graph.n_edges, 1)
    for j in range(count):
        for t in range(thin):
            sw_sweep(state, params)
            density[j * thin + t] = state.bonds.sum() / m
        bonds = state.bonds.copy()
        if box is not None:
            spanning[j] = spanning_flag(box, bonds)
        results.append(measure(bonds, j) if measure is not None else bonds.astype(np.uint8))

    return ChainRun(
        chain=chain,
        results=results,
        density_trace=density,
        tau_int=integrated_autocorrelation_time(density),
        thin=thin,
        spanning=spanning,
    )


def sample_fk(
    box: Union[Box, FiniteGraph],
    params: RcmParams,
    burn_in: int,
    thin: int,
    count: int,
    seed: int,
) -> List[EdgeConfig]:
    """count configurations of chain 0, deterministic given the seed."""
    run = run_chain(box, params, burn_in, thin, count, seed, chain=0)
    graph = box.graph if isinstance(box, Box) else box
    return [EdgeConfig(graph, bits) for bits in run.results]
