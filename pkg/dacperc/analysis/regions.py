"""
Regions cut out by a horizontal crossing R of S_{n,4n} inside S_{n,6n}, and
the FK hull of L(R) u R used by the pivotality lower bound.
"""
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Sequence, Set

import numpy as np

from dacperc.analysis.crossings import Path, lowest_crossing
from dacperc.core.errors import ClusterEscapesBox, MalformedCrossing
from dacperc.core.lattice import (
    BarrierClassification,
    Edge,
    Parallelogram,
    Vertex,
    classify_barrier,
    edge_boundary,
    make_edge,
    neighborhood,
    neighbors,
    path_is_valid,
    vertex_boundary,
)
from dacperc.models.dac import DacSample, SpinConfig, dependence_range

UNIQUENESS_STEP_LIMIT = 200_000


def quarter_root(n: int) -> int:
    """floor(n^(1/4))."""
    return math.isqrt(math.isqrt(n))


def normalize_crossing(R: Sequence, n: int, height: int) -> Path:
    """Validate R as a horizontal crossing of S_{n,height}; returned left to right."""
    path = [Vertex(*v) for v in R]
    if not path:
        raise MalformedCrossing("empty crossing")
    if not path_is_valid(path):
        raise MalformedCrossing("crossing is not a self-avoiding lattice path")
    box = Parallelogram.s(n, height)
    if any(v not in box for v in path):
        raise MalformedCrossing(f"crossing leaves {box.literal()}")
    if path[0].k == n and path[-1].k == 0:
        path = path[::-1]
    if path[0].k != 0 or path[-1].k != n:
        raise MalformedCrossing("crossing must run from the left side to the right side")
    return path


@dataclass(frozen=True, eq=False)
class CrossingRegions:
    n: int
    crossing: Path
    region: Parallelogram
    below: FrozenSet[Vertex]
    above: FrozenSet[Vertex]
    s_prime: Optional[Parallelogram]
    s_double: Optional[Parallelogram]
    radius: int

    @cached_property
    def on_crossing(self) -> FrozenSet[Vertex]:
        return frozenset(self.crossing)

    @cached_property
    def lower_hull(self) -> FrozenSet[Vertex]:
        """L(R) u R."""
        return self.below | self.on_crossing

    @cached_property
    def conditioning(self) -> FrozenSet[Vertex]:
        """D(R): vertices within n^(1/4) of L(R) u R, minus A(R) n S'."""
        near = neighborhood(self.lower_hull, self.radius)
        excluded = {v for v in self.above if self.s_prime is not None and v in self.s_prime}
        return frozenset(v for v in near if v not in excluded)

    def above_middle(self) -> Set[Vertex]:
        """A(R) n S''."""
        if self.s_double is None:
            return set()
        return {v for v in self.above if v in self.s_double}


def crossing_regions(R: Sequence, n: int) -> CrossingRegions:
    """
    A(R): vertices of S_{n,6n} off R that reach the top side avoiding R.
    L(R): the rest of S_{n,6n} off R, enclosed pockets included.
    """
    path = normalize_crossing(R, n, 4 * n)
    region = Parallelogram.s(n, 6 * n)
    on_path = set(path)

    above: Set[Vertex] = set()
    queue = deque()
    for v in region.top():
        if v not in on_path:
            above.add(v)
            queue.append(v)
    while queue:
        x = queue.popleft()
        for y in neighbors(x, region):
            if y not in above and y not in on_path:
                above.add(y)
                queue.append(y)
    below = {v for v in region if v not in above and v not in on_path}

    f = quarter_root(n)
    return CrossingRegions(
        n=n,
        crossing=path,
        region=region,
        below=frozenset(below),
        above=frozenset(above),
        s_prime=Parallelogram.maybe(f, n - f, 0, 6 * n),
        s_double=Parallelogram.maybe(2 * f, n - 2 * f, 0, 6 * n),
        radius=f,
    )


def _side_crossings(cells: Set[Vertex], n: int, limit: int = 2,
                    step_limit: int = UNIQUENESS_STEP_LIMIT) -> Optional[List[Path]]:
    """
    Horizontal crossings of S_{n,.} inside `cells` whose only left-side vertex
    is the first and only right-side vertex is the last, up to `limit` of
    them. None when the search exceeds step_limit.
    """
    found: List[Path] = []
    steps = 0
    starts = sorted((v for v in cells if v.k == 0), key=lambda v: (v.l, v.k))
    for s in starts:
        stack = [(s, [s])]
        while stack:
            steps += 1
            if steps > step_limit:
                return None
            x, path = stack.pop()
            if x.k == n:
                found.append(path)
                if len(found) >= limit:
                    return found
                continue
            for y in neighbors(x):
                if y in cells and y not in path and 0 < y.k <= n:
                    stack.append((y, path + [y]))
    return found


@dataclass(frozen=True, eq=False)
class FkHull:
    regions: CrossingRegions
    hull: FrozenSet[Vertex]
    barrier: FrozenSet[Edge]
    classification: BarrierClassification
    gamma: Optional[Path]
    t_r: bool
    in_br: bool
    conditions: Dict[str, bool] = field(default_factory=dict)


def fk_hull(sample: DacSample, R: Sequence, n: int, regions: Optional[CrossingRegions] = None) -> FkHull:
    """
    U_R = union of the FK clusters of L(R) u R, B = its edge boundary, and
    the membership test of B in the class B(R).
    """
    regions = regions or crossing_regions(R, n)
    graph = sample.graph
    ids = sample.labeling.ids
    hull_idx = [graph.index[v] for v in regions.lower_hull]
    members = np.isin(ids, np.unique(ids[hull_idx]))
    if graph.region is not None and graph.outer_boundary_mask()[members].any():
        raise ClusterEscapesBox("an FK cluster of L(R) u R reaches the box sides")
    hull = frozenset(graph.vertices[i] for i in np.flatnonzero(members).tolist())
    barrier = frozenset(edge_boundary(hull))
    classification = classify_barrier(barrier)

    f = regions.radius
    t_r = all(dependence_range(sample, v) <= f for v in regions.lower_hull)

    lower_boundary = vertex_boundary(regions.lower_hull)
    near = neighborhood(lower_boundary, f)
    interior = classification.interior

    gamma = None
    if classification.is_barrier:
        gamma = upper_boundary_crossing(classification, n)

    conditions = {
        "is_barrier": classification.is_barrier,
        "boundary_inside": classification.is_barrier and lower_boundary <= interior,
        "edges_near": all(e.u in near or e.v in near for e in barrier),
        "unique_crossing": gamma is not None,
    }
    return FkHull(
        regions=regions,
        hull=hull,
        barrier=barrier,
        classification=classification,
        gamma=gamma,
        t_r=t_r,
        in_br=all(conditions.values()),
        conditions=conditions,
    )


def upper_boundary_crossing(classification: BarrierClassification, n: int) -> Optional[Path]:
    """
    Gamma_B: the unique horizontal crossing of S_{n,4n} through vertices of
    int(B) adjacent to the exterior part reaching the top of S_{n,6n}.
    """
    interior = classification.interior
    tall = Parallelogram.s(n, 6 * n)
    outside = {v for v in tall if v not in interior}
    top_reach: Set[Vertex] = set()
    queue = deque(v for v in tall.top() if v in outside)
    top_reach.update(queue)
    while queue:
        x = queue.popleft()
        for y in neighbors(x, tall):
            if y in outside and y not in top_reach:
                top_reach.add(y)
                queue.append(y)

    strip = Parallelogram.s(n, 4 * n)
    cells = {v for v in interior if v in strip and any(w in top_reach for w in neighbors(v))}
    found = _side_crossings(cells, n)
    if found is not None and len(found) == 1:
        return found[0]
    return None


def q_condition(sample: DacSample, sigma: SpinConfig, R: Sequence, B, n: int) -> Dict[str, bool]:
    """Q(R, B) = l(R) and (B = edge boundary of U_R) and t(R), with each part reported."""
    regions = crossing_regions(R, n)
    lowest = lowest_crossing(sigma, regions.region)
    hull = fk_hull(sample, regions.crossing, n, regions)
    parts = {
        "lowest": lowest is not None and list(lowest) == regions.crossing,
        "barrier_matches": frozenset(make_edge(*e) for e in B) == hull.barrier,
        "short_ranges": hull.t_r,
    }
    parts["q"] = all(parts.values())
    return parts
