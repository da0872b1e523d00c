"""
Cut points of a crossing, their sqrt(n)-separated packing c(R), pivotal FK
clusters, and the exact Russo-formula audit on tiny graphs.
"""
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Union

import networkx as nx
import numpy as np

from dacperc.analysis.crossings import CrossingSpec, Path, has_crossing
from dacperc.analysis.regions import CrossingRegions, FkHull, crossing_regions
from dacperc.config import PACKING_EXACT_CAP, RUSSO_DR, RUSSO_TOLERANCE
from dacperc.core.errors import ConfigError, MalformedCrossing, NotDecreasingEvent, PackingCapExceeded
from dacperc.core.lattice import Parallelogram, Vertex, lattice_distance, neighbors
from dacperc.models.dac import DacSample, SpinConfig, color
from dacperc.models.rcm.exact import EXT, Event, ExactModel, dac_probability_ext

PackingMode = Literal["greedy", "exact"]


def cut_points(sigma: SpinConfig, R: Sequence, n: int, regions: Optional[CrossingRegions] = None) -> List[Vertex]:
    """
    Vertices x of R with a neighbour in A(R) n S'' joined to the top side of
    S_{n,6n} by a (+)-path inside A(R) n S''. Returned in path order.
    """
    regions = regions or crossing_regions(R, n)
    middle = regions.above_middle()
    graph = sigma.graph

    def plus(v: Vertex) -> bool:
        return sigma.spins[graph.index[v]] > 0

    reached = set()
    queue = deque()
    for v in regions.region.top():
        if v in middle and plus(v):
            reached.add(v)
            queue.append(v)
    while queue:
        x = queue.popleft()
        for y in neighbors(x):
            if y in middle and y not in reached and plus(y):
                reached.add(y)
                queue.append(y)
    return [x for x in regions.crossing if any(y in reached for y in neighbors(x))]


@dataclass
class CutPointReport:
    crossing: Path
    cut_points: List[Vertex]
    packed: List[Vertex]
    radius: float
    mode: str

    @property
    def c(self) -> int:
        return len(self.packed)

    def to_record(self) -> Dict[str, Any]:
        return {
            "crossing": [list(v) for v in self.crossing],
            "cut_points": [list(v) for v in self.cut_points],
            "packed": [list(v) for v in self.packed],
            "c": self.c,
            "radius": self.radius,
            "mode": self.mode,
        }


def _far_enough(v: Vertex, w: Vertex, n: int) -> bool:
    d = lattice_distance(v, w)
    return d * d >= n


def packed_count(cut_set: Sequence, R: Sequence, n: int, mode: PackingMode = "greedy") -> CutPointReport:
    """
    greedy: scan in path order, keep points sqrt(n)-far from every kept one.
    exact: a maximum sqrt(n)-separated subset (maximum clique of the
    compatibility graph), at most PACKING_EXACT_CAP points.
    """
    path = [Vertex(*v) for v in R]
    position = {v: i for i, v in enumerate(path)}
    points = sorted({Vertex(*v) for v in cut_set}, key=lambda v: position.get(v, -1))
    if any(v not in position for v in points):
        raise MalformedCrossing("cut set is not contained in the crossing")

    if mode == "greedy":
        kept: List[Vertex] = []
        for v in points:
            if all(_far_enough(v, w, n) for w in kept):
                kept.append(v)
    elif mode == "exact":
        if len(points) > PACKING_EXACT_CAP:
            raise PackingCapExceeded(f"{len(points)} cut points; exact packing is capped at {PACKING_EXACT_CAP}")
        compat = nx.Graph()
        compat.add_nodes_from(points)
        compat.add_edges_from((v, w) for i, v in enumerate(points) for w in points[i + 1:] if _far_enough(v, w, n))
        clique, _ = nx.max_weight_clique(compat, weight=None) if points else ([], 0)
        kept = sorted(clique, key=lambda v: position[v])
    else:
        raise ConfigError(f"unknown packing mode {mode!r}")
    return CutPointReport(crossing=path, cut_points=points, packed=kept, radius=math.sqrt(n), mode=mode)


SpinEvent = Union[CrossingSpec, Callable[[SpinConfig], bool]]


@dataclass
class PivotalReport:
    event: str
    indicator: bool
    pivotal: List[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.pivotal)

    def to_record(self) -> Dict[str, Any]:
        return {"event": self.event, "indicator": self.indicator, "pivotal": self.pivotal, "n": self.count}


def _evaluate(event: SpinEvent, sigma: SpinConfig) -> bool:
    if isinstance(event, CrossingSpec):
        return has_crossing(sigma, event)
    return bool(event(sigma))


def pivotal_clusters(sample: DacSample, r: float, event: SpinEvent,
                     window: Optional[Parallelogram] = None) -> PivotalReport:
    """FK clusters meeting the window whose spin flip toggles the event."""
    sigma = color(sample, r)
    graph = sample.graph
    if window is None and isinstance(event, CrossingSpec):
        window = event.region
    ids = sample.labeling.ids
    candidates = np.unique(ids[graph.view(window).mask]) if window is not None else sample.labeling.identifiers
    base = _evaluate(event, sigma)

    label = event.label if isinstance(event, CrossingSpec) else getattr(event, "__name__", "event")
    report = PivotalReport(event=label, indicator=base)
    for root in candidates.tolist():
        flipped = sigma.spins.copy()
        cluster = ids == root
        flipped[cluster] = -flipped[cluster]
        if _evaluate(event, SpinConfig(graph, flipped)) != base:
            report.pivotal.append(int(root))
    return report


def gamma_pivotality(sample: DacSample, r: float, hull: FkHull, mode: PackingMode = "greedy") -> Dict[str, Any]:
    """
    On a sample where the Q(R, B) parts hold, every packed cut point of
    Gamma_B should sit in its own FK cluster, pivotal for H- of S_{n,6n}.
    """
    if hull.gamma is None:
        return {"applicable": False}
    n = hull.regions.n
    sigma = color(sample, r)
    gamma_regions = crossing_regions(hull.gamma, n)
    packing = packed_count(cut_points(sigma, hull.gamma, n, gamma_regions), hull.gamma, n, mode)
    spec = CrossingSpec(hull.regions.region, "horizontal", -1)
    pivots = pivotal_clusters(sample, r, spec)
    index = sample.graph.index
    roots = [int(sample.labeling.ids[index[v]]) for v in packing.packed]
    distinct = len(set(roots)) == len(roots)
    return {
        "applicable": True,
        "c": packing.c,
        "n_pivotal": pivots.count,
        "distinct_clusters": distinct,
        "all_pivotal": all(root in pivots.pivotal for root in roots),
        "bound_holds": pivots.count >= packing.c,
    }


def _spin_table(model: ExactModel, event) -> np.ndarray:
    if isinstance(event, Event):
        if event.table.shape[0] != 1:
            raise ConfigError("russo audit needs an event on spins only")
        return np.broadcast_to(event.table[0], model.spin_codes.shape).copy()
    if isinstance(event, CrossingSpec):
        return np.array([has_crossing(SpinConfig(model.graph, s), event) for s in model.spin_vectors])
    return np.array([bool(event(s)) for s in model.spin_vectors])


def is_decreasing(model: ExactModel, table: np.ndarray) -> bool:
    """Turning any (-) vertex into (+) never creates the event."""
    codes = model.spin_codes.astype(np.int64)
    for i in range(model.n_vertices):
        lo = codes[((codes >> i) & 1) == 0]
        if np.any(table[lo | (1 << i)] & ~table[lo]):
            return False
    return True


@dataclass
class RussoAudit:
    r: float
    dr: float
    lhs: float
    rhs: float

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)

    def agrees(self, tol: float = RUSSO_TOLERANCE) -> bool:
        return self.difference <= tol


def expected_pivotal_count(model: ExactModel, r: float, table: np.ndarray) -> float:
    """E[n(A)]: for every (eta, sigma), the clusters of eta whose flip toggles A."""
    joint = model.joint(r)
    labels = model.labels
    n = model.n_vertices
    codes = model.spin_codes
    bits = np.left_shift(np.uint64(1), np.arange(n, dtype=np.uint64))
    count = np.zeros(joint.shape, dtype=np.int64)
    for i in range(n):
        members = ((labels == i).astype(np.uint64) * bits).sum(axis=1).astype(np.uint64)
        is_root = members != 0
        if not is_root.any():
            continue
        flipped = codes[None, :] ^ members[is_root][:, None]
        toggles = table[flipped.astype(np.int64)] != table[None, :]
        count[is_root] += toggles
    return float((joint * count).sum(dtype=EXT))


def russo_audit(model: ExactModel, event, r: float, dr: float = RUSSO_DR) -> RussoAudit:
    """
    lhs: central-difference derivative in r of P(A); rhs: -E[n(A)]. Both
    probabilities are summed in extended precision and differenced before
    rounding. r must lie in [dr, 1 - dr].
    """
    if not 0.0 < dr < 0.5:
        raise ConfigError(f"dr must lie in (0, 0.5), got {dr}")
    if not dr <= r <= 1.0 - dr:
        raise ConfigError(f"r must lie in [dr, 1 - dr] = [{dr:g}, {1.0 - dr:g}], got {r}")
    table = _spin_table(model, event)
    if not is_decreasing(model, table):
        raise NotDecreasingEvent("event is not decreasing in the spins")
    ev = Event(model, table[None, :])
    lo, hi = max(r - dr, 0.0), min(r + dr, 1.0)
    lhs = float((dac_probability_ext(model, hi, ev) - dac_probability_ext(model, lo, ev)) / EXT(hi - lo))
    rhs = -expected_pivotal_count(model, r, table)
    return RussoAudit(r=r, dr=dr, lhs=lhs, rhs=rhs)
