"""
Spin clusters and crossings of parallelograms.

A horizontal crossing of [a, b] x [c, d] runs from the left side {a} x [c, d]
to the right side {b} x [c, d]; a vertical one from the top side to the
bottom side. Paths stay inside the region and may touch any side.
"""
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from dacperc.core.errors import ConfigError, MalformedCrossing
from dacperc.core.lattice import NEIGHBOR_OFFSETS, RING_OFFSETS, Parallelogram, RegionView, Vertex
from dacperc.core.union_find import UnionFind
from dacperc.models.dac import DacSample, SpinConfig
from dacperc.models.rcm.sampler import cluster_identifiers

Path = List[Vertex]
Direction = Literal["horizontal", "vertical"]


def parse_sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ConfigError(f"sign must be + or -, got {sign!r}")


@dataclass(frozen=True)
class CrossingSpec:
    region: Parallelogram
    direction: Direction = "horizontal"
    sign: int = 1

    def __post_init__(self):
        if self.direction not in ("horizontal", "vertical"):
            raise ConfigError(f"direction must be horizontal or vertical, got {self.direction!r}")
        object.__setattr__(self, "sign", parse_sign(self.sign))

    @property
    def label(self) -> str:
        return ("H" if self.direction == "horizontal" else "V") + ("+" if self.sign > 0 else "-")

    def sides(self, view: RegionView) -> Tuple[np.ndarray, np.ndarray]:
        if self.direction == "horizontal":
            return view.left, view.right
        return view.top, view.bottom

    def __call__(self, sigma: SpinConfig) -> bool:
        return has_crossing(sigma, self)


@dataclass(frozen=True, eq=False)
class SpinClusters:
    """Identifier per vertex (smallest vertex index of its spin cluster, -1 outside the region)."""
    sigma: SpinConfig
    ids: np.ndarray

    @cached_property
    def sizes(self) -> Dict[int, int]:
        inside = self.ids >= 0
        roots, counts = np.unique(self.ids[inside], return_counts=True)
        return dict(zip(roots.tolist(), counts.tolist()))

    @property
    def count(self) -> int:
        return len(self.sizes)

    def sign_of(self, identifier: int) -> int:
        return int(self.sigma.spins[identifier])

    def cluster_sizes(self, sign: int) -> np.ndarray:
        return np.array([size for root, size in self.sizes.items() if self.sign_of(root) == sign], dtype=np.int64)

    def members(self, identifier: int) -> np.ndarray:
        return np.flatnonzero(self.ids == identifier)


def spin_clusters(sigma: SpinConfig, region: Optional[Parallelogram] = None) -> SpinClusters:
    g = sigma.graph
    edge_mask = sigma.spins[g.edge_u] == sigma.spins[g.edge_v]
    if region is None:
        return SpinClusters(sigma, cluster_identifiers(g, edge_mask))
    view = g.view(region)
    ids = cluster_identifiers(g, edge_mask & view.edge_mask)
    return SpinClusters(sigma, np.where(view.mask, ids, -1))


def has_crossing(sigma: SpinConfig, spec: CrossingSpec) -> bool:
    g = sigma.graph
    view = g.view(spec.region)
    active = view.mask & (sigma.spins == spec.sign)
    start, end = spec.sides(view)
    if not (active & start).any() or not (active & end).any():
        return False
    ids = cluster_identifiers(g, active[g.edge_u] & active[g.edge_v])
    return bool(np.intersect1d(ids[active & start], ids[active & end]).size)


def find_crossing(sigma: SpinConfig, spec: CrossingSpec) -> Optional[Path]:
    """Breadth-first witness, neighbours explored in NEIGHBOR_OFFSETS order."""
    g = sigma.graph
    view = g.view(spec.region)
    active = view.mask & (sigma.spins == spec.sign)
    start, end = spec.sides(view)

    parent: Dict[int, int] = {}
    queue = deque()
    for i in np.flatnonzero(active & start).tolist():
        parent[i] = -1
        queue.append(i)
    while queue:
        i = queue.popleft()
        if end[i]:
            path = []
            while i != -1:
                path.append(g.vertices[i])
                i = parent[i]
            return path[::-1]
        v = g.vertices[i]
        for dk, dl in NEIGHBOR_OFFSETS:
            j = g.index.get(Vertex(v.k + dk, v.l + dl))
            if j is not None and active[j] and j not in parent:
                parent[j] = i
                queue.append(j)
    return None


def _loop_erase(walk: Sequence[Vertex]) -> Path:
    path: Path = []
    position: Dict[Vertex, int] = {}
    for v in walk:
        if v in position:
            cut = position[v]
            for u in path[cut + 1:]:
                del position[u]
            path = path[:cut + 1]
            continue
        position[v] = len(path)
        path.append(v)
    return path


def lowest_crossing(sigma: SpinConfig, region: Parallelogram) -> Optional[Path]:
    """
    Lowest horizontal (-)-crossing of the region, or None.

    Walks the interface between the (+)-set attached to the bottom and the
    (-)-vertices, in the region padded by one: the padding rows below and
    above count as (+), the padding columns left and right as (-). The (-)
    vertices met after the last visit to the left padding, loop-erased in
    order, form the crossing.
    """
    g = sigma.graph
    g.view(region)
    a, b, c, d = region.a, region.b, region.c, region.d

    def plus(v: Tuple[int, int]) -> bool:
        k, l = v
        if l <= c - 1 or l >= d + 1:
            return True
        if k <= a - 1 or k >= b + 1:
            return False
        return sigma.spins[g.index[Vertex(k, l)]] > 0

    base, w = (a - 1, c - 1), (a - 1, c)
    visited = [w]
    cap = 6 * (region.width + 2) * (region.height + 2) + 6
    for _ in range(cap):
        if w[0] == b + 1:
            break
        if base[1] == d + 1:
            return None
        i = RING_OFFSETS.index((w[0] - base[0], w[1] - base[1]))
        dk, dl = RING_OFFSETS[(i - 1) % 6]
        z = (base[0] + dk, base[1] + dl)
        if plus(z):
            base = z
        else:
            w = z
            visited.append(w)
    else:
        raise MalformedCrossing("interface walk did not terminate")

    last_left = max(j for j, v in enumerate(visited) if v[0] == a - 1)
    walk = [Vertex(*v) for v in visited[last_left + 1:-1]]
    return _loop_erase(walk)


def crossing_threshold(sample: DacSample, spec: CrossingSpec) -> float:
    """
    The r at which the crossing switches in the coloured sample.

    For sign + the crossing occurs in color(sample, r) iff r > threshold;
    for sign - iff r <= threshold. Clusters are switched on one at a time in
    order of their marks and joined by union-find between a virtual source
    (start side) and sink (end side).
    """
    g = sample.graph
    view = g.view(spec.region)
    start, end = spec.sides(view)
    members = view.indices
    local = {int(v): j for j, v in enumerate(members.tolist())}
    source, sink = members.size, members.size + 1
    uf = UnionFind(members.size + 2)
    on = np.zeros(g.n_vertices, dtype=bool)

    marks = sample.marks[members]
    order = np.argsort(marks if spec.sign > 0 else -marks, kind="stable")
    for j in order.tolist():
        i = int(members[j])
        on[i] = True
        if start[i]:
            uf.union(j, source)
        if end[i]:
            uf.union(j, sink)
        v = g.vertices[i]
        for dk, dl in NEIGHBOR_OFFSETS:
            n = g.index.get(Vertex(v.k + dk, v.l + dl))
            if n is not None and on[n]:
                uf.union(j, local[n])
        if uf.connected(source, sink):
            return float(marks[j])
    raise MalformedCrossing("region has no crossing even with every vertex switched on")


def crossing_indicator(threshold: float, r: float, sign: int) -> bool:
    return r > threshold if sign > 0 else r <= threshold
