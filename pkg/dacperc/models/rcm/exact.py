"""
Exhaustive oracle for the random-cluster measure and the DaC measure on tiny graphs.

Edge configurations are integers: bit e is edge e of the graph. Spin
configurations are integers too: bit i is 1 iff vertex i has spin +1.
"""
from functools import cached_property
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from dacperc.config import ORACLE_EDGE_CAP, ORACLE_JOINT_CELL_CAP, ORACLE_LABEL_CELL_CAP
from dacperc.core.errors import ConfigError, OracleCapExceeded, ZeroProbabilityCondition
from dacperc.core.lattice import FiniteGraph, Vertex

CHUNK = 1 << 16

# accumulation dtype for weights, probabilities and joint tables
EXT = np.longdouble

EdgeRef = Union[int, Tuple[Vertex, Vertex]]


def _label_chunk(graph: FiniteGraph, etas: np.ndarray) -> np.ndarray:
    """Min-label propagation over open edges for a block of edge configurations."""
    n, m = graph.n_vertices, graph.n_edges
    dtype = np.uint8 if n < 256 else np.uint16
    labels = np.tile(np.arange(n, dtype=dtype), (etas.size, 1))
    if m == 0:
        return labels
    bits = ((etas[:, None] >> np.arange(m, dtype=np.uint64)) & np.uint64(1)).astype(bool)
    changed = True
    while changed:
        changed = False
        for e in range(m):
            rows = np.flatnonzero(bits[:, e])
            if rows.size == 0:
                continue
            u, v = graph.edge_u[e], graph.edge_v[e]
            a, b = labels[rows, u], labels[rows, v]
            if np.any(a != b):
                low = np.minimum(a, b)
                labels[rows, u] = low
                labels[rows, v] = low
                changed = True
    return labels


class ExactModel:
    """
    The random-cluster measure on an explicit graph, tabulated over all
    2^|E| edge configurations with weight p^o (1-p)^c q^k.

    Immutable once built; the DaC joint table for a given r is computed on
    demand and cached.
    """

    def __init__(self, graph: FiniteGraph, p: float, q: float = 2.0):
        m = graph.n_edges
        if m > ORACLE_EDGE_CAP:
            raise OracleCapExceeded(f"graph has {m} edges; the exact oracle is capped at {ORACLE_EDGE_CAP}")
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"p must lie in [0, 1], got {p}")
        if q <= 0.0:
            raise ConfigError(f"q must be > 0, got {q}")
        self.graph = graph
        self.p = float(p)
        self.q = float(q)
        self.configs = np.arange(1 << m, dtype=np.uint64)
        self.open_counts = np.bitwise_count(self.configs).astype(np.int64)

        n = graph.n_vertices
        ident = np.arange(n)
        self.cluster_counts = np.empty(1 << m, dtype=np.int64)
        for start in range(0, 1 << m, CHUNK):
            chunk = self.configs[start:start + CHUNK]
            self.cluster_counts[start:start + chunk.size] = (_label_chunk(graph, chunk) == ident).sum(axis=1)

        p_ext, q_ext = EXT(self.p), EXT(self.q)
        weights = (np.power(p_ext, self.open_counts)
                   * np.power(EXT(1) - p_ext, m - self.open_counts)
                   * np.power(q_ext, self.cluster_counts))
        total = weights.sum(dtype=EXT)
        self.Z = float(total)
        self.probs = weights / total
        self._joint_cache: Dict[float, np.ndarray] = {}

    @property
    def n_edges(self) -> int:
        return self.graph.n_edges

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    def edge_index(self, e: EdgeRef) -> int:
        if isinstance(e, (int, np.integer)):
            if not 0 <= e < self.n_edges:
                raise ConfigError(f"edge index {e} out of range")
            return int(e)
        return self.graph.edge_id(*e)

    def vertex_index(self, v) -> int:
        if isinstance(v, (int, np.integer)):
            return int(v)
        return self.graph.index[Vertex(*v)]

    def open_bits(self, e: EdgeRef) -> np.ndarray:
        return ((self.configs >> np.uint64(self.edge_index(e))) & np.uint64(1)).astype(bool)

    def edge_marginal(self, e: EdgeRef) -> float:
        return float(self.probs[self.open_bits(e)].sum())

    def edge_marginals(self) -> np.ndarray:
        return np.array([self.edge_marginal(e) for e in range(self.n_edges)])

    def two_edge_joint(self, e: EdgeRef, f: EdgeRef) -> np.ndarray:
        """2x2 table, rows indexed by the state of e, columns by the state of f."""
        a, b = self.open_bits(e), self.open_bits(f)
        table = np.empty((2, 2))
        for i in (0, 1):
            for j in (0, 1):
                table[i, j] = self.probs[(a == bool(i)) & (b == bool(j))].sum()
        return table

    def edge_pattern(self, assignment: Mapping[EdgeRef, int]) -> Tuple[int, int]:
        """(mask, value) such that a configuration satisfies the assignment iff eta & mask == value."""
        mask = value = 0
        for e, state in assignment.items():
            i = self.edge_index(e)
            mask |= 1 << i
            if state:
                value |= 1 << i
        return mask, value

    def consistent(self, assignment: Mapping[EdgeRef, int]) -> np.ndarray:
        mask, value = self.edge_pattern(assignment)
        return (self.configs & np.uint64(mask)) == np.uint64(value)

    def conditional_edge_given_edges(self, e: EdgeRef, assignment: Mapping[EdgeRef, int]) -> float:
        """nu_{p,q}(eta(e) = 1 | eta equals the assignment)."""
        rows = self.consistent(assignment)
        den = self.probs[rows].sum()
        if den <= 0.0:
            raise ZeroProbabilityCondition("conditioning edge pattern has probability zero")
        return float(self.probs[rows & self.open_bits(e)].sum() / den)

    @cached_property
    def labels(self) -> np.ndarray:
        """Cluster identifier (smallest vertex index) of every vertex, per configuration."""
        cells = (1 << self.n_edges) * self.n_vertices
        if cells > ORACLE_LABEL_CELL_CAP:
            raise OracleCapExceeded(f"label table would have {cells} cells (cap {ORACLE_LABEL_CELL_CAP})")
        return _label_chunk(self.graph, self.configs)

    @cached_property
    def root_masks(self) -> np.ndarray:
        """Bit i set iff vertex i is the identifier of its cluster."""
        roots = self.labels == np.arange(self.n_vertices)
        weights = np.left_shift(np.uint64(1), np.arange(self.n_vertices, dtype=np.uint64))
        return (roots.astype(np.uint64) * weights).sum(axis=1).astype(np.uint64)

    def clusters_meeting(self, vertices: Iterable) -> np.ndarray:
        """Number of distinct FK clusters containing a vertex of the set, per configuration."""
        cols = sorted({self.vertex_index(v) for v in vertices})
        if not cols:
            return np.zeros(self.configs.size, dtype=np.int64)
        sub = np.sort(self.labels[:, cols], axis=1)
        return 1 + (np.diff(sub, axis=1) != 0).sum(axis=1)

    @cached_property
    def spin_codes(self) -> np.ndarray:
        return np.arange(1 << self.n_vertices, dtype=np.uint64)

    @cached_property
    def spin_vectors(self) -> np.ndarray:
        """(2^n, n) array of +-1 spins."""
        bits = (self.spin_codes[:, None] >> np.arange(self.n_vertices, dtype=np.uint64)) & np.uint64(1)
        return np.where(bits == 1, 1, -1).astype(np.int8)

    @cached_property
    def bit_vectors(self) -> np.ndarray:
        """(2^m, m) boolean array of open edges."""
        return ((self.configs[:, None] >> np.arange(self.n_edges, dtype=np.uint64)) & np.uint64(1)).astype(bool)

    def vertex_pattern(self, vertices: Iterable) -> int:
        mask = 0
        for v in vertices:
            mask |= 1 << self.vertex_index(v)
        return mask

    def joint(self, r: float) -> np.ndarray:
        """P(eta, sigma) as a (2^m, 2^n) table."""
        if not 0.0 <= r <= 1.0:
            raise ConfigError(f"r must lie in [0, 1], got {r}")
        m, n = self.n_edges, self.n_vertices
        if (1 << (m + n)) > ORACLE_JOINT_CELL_CAP:
            raise OracleCapExceeded(f"joint table needs 2^{m + n} cells (cap {ORACLE_JOINT_CELL_CAP})")
        key = float(r)
        cached = self._joint_cache.get(key)
        if cached is not None:
            return cached

        labels = self.labels.astype(np.uint64)
        sigma = self.spin_codes
        compatible = np.ones((1 << m, 1 << n), dtype=bool)
        for i in range(n):
            own = (sigma >> np.uint64(i)) & np.uint64(1)
            at_root = (sigma[None, :] >> labels[:, i][:, None]) & np.uint64(1)
            compatible &= at_root == own[None, :]
        plus = np.bitwise_count(sigma[None, :] & self.root_masks[:, None]).astype(np.int64)
        minus = self.cluster_counts[:, None] - plus
        r_ext = EXT(key)
        weights = np.power(r_ext, plus) * np.power(EXT(1) - r_ext, minus)
        table = np.where(compatible, weights * self.probs[:, None], EXT(0))
        self._joint_cache[key] = table
        return table


class Event:
    """
    Indicator table over (eta, sigma), broadcastable to (2^m, 2^n). Edge-only
    events have shape (2^m, 1), spin-only events (1, 2^n).
    """

    def __init__(self, model: ExactModel, table: np.ndarray):
        self.model = model
        self.table = np.asarray(table, dtype=bool)

    def __and__(self, other: "Event") -> "Event":
        return Event(self.model, self.table & other.table)

    def __or__(self, other: "Event") -> "Event":
        return Event(self.model, self.table | other.table)

    def __invert__(self) -> "Event":
        return Event(self.model, ~self.table)

    @property
    def edge_only(self) -> bool:
        return self.table.shape[1] == 1

    @classmethod
    def whole(cls, model: ExactModel) -> "Event":
        return cls(model, np.ones((1, 1), dtype=bool))

    @classmethod
    def edges_in_state(cls, model: ExactModel, assignment: Mapping[EdgeRef, int]) -> "Event":
        return cls(model, model.consistent(assignment)[:, None])

    @classmethod
    def spins_equal(cls, model: ExactModel, assignment: Mapping) -> "Event":
        """Every listed vertex has the given spin (+1 or -1)."""
        mask = value = 0
        for v, spin in assignment.items():
            bit = 1 << model.vertex_index(v)
            mask |= bit
            if spin > 0:
                value |= bit
        return cls(model, ((model.spin_codes & np.uint64(mask)) == np.uint64(value))[None, :])

    @classmethod
    def spin_event(cls, model: ExactModel, predicate: Callable[[np.ndarray], bool]) -> "Event":
        """predicate receives the +-1 spin vector in vertex order."""
        return cls(model, np.array([bool(predicate(s)) for s in model.spin_vectors])[None, :])

    @classmethod
    def config_event(cls, model: ExactModel, predicate: Callable[[np.ndarray], bool]) -> "Event":
        return cls(model, np.array([bool(predicate(b)) for b in model.bit_vectors])[:, None])

    @classmethod
    def from_predicate(cls, model: ExactModel, predicate: Callable[[np.ndarray, np.ndarray], bool]) -> "Event":
        table = np.array([[bool(predicate(b, s)) for s in model.spin_vectors] for b in model.bit_vectors])
        return cls(model, table)


Condition = Union[None, Event, Callable[[np.ndarray, np.ndarray], bool]]


def _as_event(model: ExactModel, event: Condition) -> Event:
    if event is None:
        return Event.whole(model)
    if isinstance(event, Event):
        return event
    return Event.from_predicate(model, event)


def exact_distribution(graph: FiniteGraph, p: float, q: float = 2.0) -> ExactModel:
    return ExactModel(graph, p, q)


def dac_probability_ext(model: ExactModel, r: float, event: Condition) -> np.longdouble:
    """exact_dac_probability before rounding to float64."""
    ev = _as_event(model, event)
    if ev.edge_only:
        if not 0.0 <= r <= 1.0:
            raise ConfigError(f"r must lie in [0, 1], got {r}")
        return model.probs[np.broadcast_to(ev.table[:, 0], model.probs.shape)].sum(dtype=EXT)
    joint = model.joint(r)
    return np.where(ev.table, joint, EXT(0)).sum(dtype=EXT)


def exact_dac_probability(model: ExactModel, r: float, event: Condition) -> float:
    """Sum over eta of P(eta) times the colouring probability of the event."""
    return float(dac_probability_ext(model, r, event))


def exact_conditional_edge_prob(model: ExactModel, r: float, e: EdgeRef, condition: Condition = None) -> float:
    """P(eta(e) = 1 | condition), by restricted enumeration."""
    ev = _as_event(model, condition)
    opened = Event(model, model.open_bits(e)[:, None])
    den = exact_dac_probability(model, r, ev)
    if den <= 0.0:
        raise ZeroProbabilityCondition("conditioning event has probability zero")
    return exact_dac_probability(model, r, ev & opened) / den
