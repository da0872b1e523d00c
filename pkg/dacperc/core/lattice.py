"""
Triangular-lattice geometry in axial coordinates (k, l).

The lattice vertex (k, l) sits at (k - l/2, sqrt(3)/2 * l) in the plane. Six
neighbours: (k +- 1, l), (k, l +- 1), (k + 1, l + 1), (k - 1, l - 1).
"""
import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Set, Tuple, Union

import networkx as nx
import numpy as np
from scipy import sparse

from dacperc.core.errors import LatticeError


class Vertex(NamedTuple):
    k: int
    l: int


class Edge(NamedTuple):
    """Unordered edge stored with u < v in (l, k) order."""
    u: Vertex
    v: Vertex


NEIGHBOR_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1))
# counter-clockwise around a vertex in the plane embedding
RING_OFFSETS = ((1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1))
FORWARD_OFFSETS = ((1, 0), (0, 1), (1, 1))

SQRT3_2 = math.sqrt(3.0) / 2.0


def _row_major_key(v: Vertex) -> Tuple[int, int]:
    return (v[1], v[0])


def make_edge(a: Vertex, b: Vertex) -> Edge:
    a, b = Vertex(*a), Vertex(*b)
    if _row_major_key(b) < _row_major_key(a):
        a, b = b, a
    return Edge(a, b)


def embed(v: Vertex) -> Tuple[float, float]:
    return (v[0] - v[1] / 2.0, SQRT3_2 * v[1])


def are_adjacent(v: Vertex, w: Vertex) -> bool:
    return (w[0] - v[0], w[1] - v[1]) in NEIGHBOR_OFFSETS


@dataclass(frozen=True)
class Parallelogram:
    """Vertex set [a, b] x [c, d]; S_{n,m} is Parallelogram(0, n, 0, m)."""
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a > self.b or self.c > self.d:
            raise LatticeError(f"empty parallelogram [{self.a},{self.b}]x[{self.c},{self.d}]")

    @classmethod
    def s(cls, n: int, m: int) -> "Parallelogram":
        return cls(0, n, 0, m)

    @classmethod
    def maybe(cls, a: int, b: int, c: int, d: int) -> Optional["Parallelogram"]:
        if a > b or c > d:
            return None
        return cls(a, b, c, d)

    @classmethod
    def parse(cls, literal: str) -> "Parallelogram":
        """Parse "Sa,b,c,d" or "S n m"."""
        text = literal.strip()
        match = re.fullmatch(r"S\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)", text)
        if match:
            return cls(*(int(x) for x in match.groups()))
        match = re.fullmatch(r"S\s+(\d+)\s+(\d+)", text)
        if match:
            return cls.s(int(match.group(1)), int(match.group(2)))
        raise LatticeError(f"cannot parse region literal {literal!r}")

    @property
    def width(self) -> int:
        return self.b - self.a + 1

    @property
    def height(self) -> int:
        return self.d - self.c + 1

    def __len__(self) -> int:
        return self.width * self.height

    def __contains__(self, v) -> bool:
        return self.a <= v[0] <= self.b and self.c <= v[1] <= self.d

    def __iter__(self) -> Iterator[Vertex]:
        for l in range(self.c, self.d + 1):
            for k in range(self.a, self.b + 1):
                yield Vertex(k, l)

    def index(self, v: Vertex) -> int:
        return (v[1] - self.c) * self.width + (v[0] - self.a)

    def vertex_at(self, i: int) -> Vertex:
        row, col = divmod(i, self.width)
        return Vertex(self.a + col, self.c + row)

    def left(self) -> List[Vertex]:
        return [Vertex(self.a, l) for l in range(self.c, self.d + 1)]

    def right(self) -> List[Vertex]:
        return [Vertex(self.b, l) for l in range(self.c, self.d + 1)]

    def bottom(self) -> List[Vertex]:
        return [Vertex(k, self.c) for k in range(self.a, self.b + 1)]

    def top(self) -> List[Vertex]:
        return [Vertex(k, self.d) for k in range(self.a, self.b + 1)]

    def on_sides(self, v: Vertex) -> bool:
        return v in self and (v[0] in (self.a, self.b) or v[1] in (self.c, self.d))

    def grow(self, margin: int) -> "Parallelogram":
        return Parallelogram(self.a - margin, self.b + margin, self.c - margin, self.d + margin)

    def literal(self) -> str:
        return f"S{self.a},{self.b},{self.c},{self.d}"

    def is_square(self) -> bool:
        return self.a == self.c and self.b == self.d


@dataclass(frozen=True)
class Box:
    """Simulation domain: outer parallelogram with an inner measurement window buffer vertices deep."""
    outer: Parallelogram
    buffer: int
    inner: Parallelogram

    def __post_init__(self):
        if self.buffer < 0:
            raise LatticeError("buffer must be nonnegative")
        o, i = self.outer, self.inner
        if not (o.a + self.buffer <= i.a and i.b <= o.b - self.buffer
                and o.c + self.buffer <= i.c and i.d <= o.d - self.buffer):
            raise LatticeError(f"inner {i.literal()} is not {self.buffer} deep inside {o.literal()}")

    @classmethod
    def around(cls, inner: Parallelogram, buffer: int) -> "Box":
        return cls(inner.grow(buffer), buffer, inner)

    @cached_property
    def graph(self) -> "FiniteGraph":
        return FiniteGraph.from_parallelogram(self.outer)


class RegionView(NamedTuple):
    region: Parallelogram
    indices: np.ndarray
    mask: np.ndarray
    edge_mask: np.ndarray
    left: np.ndarray
    right: np.ndarray
    bottom: np.ndarray
    top: np.ndarray


class FiniteGraph:
    """
    A finite subgraph of the triangular lattice induced by a vertex set.

    Vertices are stored in (l, k)-lexicographic order, so the row-major index
    of a vertex is its position and the minimal index in a set is its
    lexicographically smallest vertex. Edges are enumerated per vertex with
    offsets (1, 0), (0, 1), (1, 1).
    """

    def __init__(self, vertices: Iterable[Vertex], region: Optional[Parallelogram] = None):
        ordered = sorted({Vertex(*v) for v in vertices}, key=_row_major_key)
        if not ordered:
            raise LatticeError("graph needs at least one vertex")
        self.vertices: Tuple[Vertex, ...] = tuple(ordered)
        self.index: Dict[Vertex, int] = {v: i for i, v in enumerate(self.vertices)}
        self.region = region
        self.k = np.array([v.k for v in self.vertices], dtype=np.int64)
        self.l = np.array([v.l for v in self.vertices], dtype=np.int64)

        us, vs = [], []
        for i, v in enumerate(self.vertices):
            for dk, dl in FORWARD_OFFSETS:
                j = self.index.get(Vertex(v.k + dk, v.l + dl))
                if j is not None:
                    us.append(i)
                    vs.append(j)
        self.edge_u = np.array(us, dtype=np.int64)
        self.edge_v = np.array(vs, dtype=np.int64)
        self.edge_lookup: Dict[Tuple[int, int], int] = {}
        for e, (i, j) in enumerate(zip(us, vs)):
            self.edge_lookup[(i, j)] = e
            self.edge_lookup[(j, i)] = e
        self._views: Dict[Parallelogram, RegionView] = {}

    @classmethod
    def from_parallelogram(cls, region: Parallelogram) -> "FiniteGraph":
        return cls(iter(region), region=region)

    @classmethod
    def single_edge(cls) -> "FiniteGraph":
        return cls([Vertex(0, 0), Vertex(1, 0)])

    @classmethod
    def triangle(cls) -> "FiniteGraph":
        return cls([Vertex(0, 0), Vertex(1, 0), Vertex(1, 1)])

    @classmethod
    def named(cls, name: str) -> "FiniteGraph":
        """Library graphs: "single-edge", "triangle", or a parallelogram literal such as "S1,1"."""
        if name == "single-edge":
            return cls.single_edge()
        if name == "triangle":
            return cls.triangle()
        match = re.fullmatch(r"S(\d+),(\d+)", name.replace(" ", ""))
        if match:
            return cls.from_parallelogram(Parallelogram.s(int(match.group(1)), int(match.group(2))))
        return cls.from_parallelogram(Parallelogram.parse(name))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return int(self.edge_u.size)

    def edge(self, e: int) -> Edge:
        return make_edge(self.vertices[self.edge_u[e]], self.vertices[self.edge_v[e]])

    def edge_id(self, a: Vertex, b: Vertex) -> int:
        try:
            return self.edge_lookup[(self.index[Vertex(*a)], self.index[Vertex(*b)])]
        except KeyError:
            raise LatticeError(f"{a}-{b} is not an edge of this graph") from None

    def edges(self) -> List[Edge]:
        return [self.edge(e) for e in range(self.n_edges)]

    def vertex_mask(self, vertices: Iterable[Vertex]) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        for v in vertices:
            i = self.index.get(Vertex(*v))
            if i is not None:
                mask[i] = True
        return mask

    def adjacency(self, edge_mask: np.ndarray) -> sparse.csr_matrix:
        u = self.edge_u[edge_mask]
        v = self.edge_v[edge_mask]
        data = np.ones(u.size, dtype=np.int8)
        n = self.n_vertices
        return sparse.coo_matrix((data, (u, v)), shape=(n, n)).tocsr()

    def outer_boundary_mask(self) -> np.ndarray:
        """Vertices on the sides of the graph's parallelogram (all False for non-parallelogram graphs)."""
        if self.region is None:
            return np.zeros(self.n_vertices, dtype=bool)
        return self.view(self.region).mask & (
            (self.k == self.region.a) | (self.k == self.region.b)
            | (self.l == self.region.c) | (self.l == self.region.d)
        )

    def view(self, region: Parallelogram) -> RegionView:
        cached = self._views.get(region)
        if cached is not None:
            return cached
        mask = (self.k >= region.a) & (self.k <= region.b) & (self.l >= region.c) & (self.l <= region.d)
        if int(mask.sum()) != len(region):
            raise LatticeError(f"region {region.literal()} does not fit in the graph")
        view = RegionView(
            region=region,
            indices=np.flatnonzero(mask),
            mask=mask,
            edge_mask=mask[self.edge_u] & mask[self.edge_v],
            left=mask & (self.k == region.a),
            right=mask & (self.k == region.b),
            bottom=mask & (self.l == region.c),
            top=mask & (self.l == region.d),
        )
        self._views[region] = view
        return view

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from((self.vertices[i], self.vertices[j]) for i, j in zip(self.edge_u, self.edge_v))
        return graph


Domain = Union[None, Parallelogram, Box, FiniteGraph, Set[Vertex], FrozenSet[Vertex]]


def _contains(domain: Domain, v: Vertex) -> bool:
    if domain is None:
        return True
    if isinstance(domain, Box):
        return v in domain.outer
    if isinstance(domain, FiniteGraph):
        return v in domain.index
    return v in domain


def neighbors(v: Vertex, domain: Domain = None) -> List[Vertex]:
    """The six lattice neighbours of v, in NEIGHBOR_OFFSETS order, truncated to the domain."""
    out = []
    for dk, dl in NEIGHBOR_OFFSETS:
        w = Vertex(v[0] + dk, v[1] + dl)
        if _contains(domain, w):
            out.append(w)
    return out


def lattice_distance(v: Vertex, w: Vertex) -> int:
    dk = w[0] - v[0]
    dl = w[1] - v[1]
    if dk * dl >= 0:
        return max(abs(dk), abs(dl))
    return abs(dk) + abs(dl)


def _bfs_distances(sources: Iterable[Vertex], domain: Domain, limit: Optional[int] = None) -> Dict[Vertex, int]:
    dist: Dict[Vertex, int] = {}
    queue = deque()
    for s in sources:
        s = Vertex(*s)
        if s not in dist and _contains(domain, s):
            dist[s] = 0
            queue.append(s)
    while queue:
        x = queue.popleft()
        d = dist[x]
        if limit is not None and d >= limit:
            continue
        for y in neighbors(x, domain):
            if y not in dist:
                dist[y] = d + 1
                queue.append(y)
    return dist


def graph_distance(v: Vertex, w: Vertex, domain: Domain = None) -> int:
    """
    Shortest-path length between v and w.

    On the infinite lattice and inside any parallelogram the closed form
    applies (a shortest path never leaves the bounding parallelogram of its
    endpoints). Other vertex sets fall back to breadth-first search.
    """
    v, w = Vertex(*v), Vertex(*w)
    if not (_contains(domain, v) and _contains(domain, w)):
        raise LatticeError(f"{v} or {w} lies outside the domain")
    if domain is None or isinstance(domain, (Parallelogram, Box)) or (
            isinstance(domain, FiniteGraph) and domain.region is not None):
        return lattice_distance(v, w)
    dist = _bfs_distances([v], domain)
    if w not in dist:
        raise LatticeError(f"{w} is not reachable from {v} in the domain")
    return dist[w]


def ball(v: Vertex, n: int, domain: Domain = None) -> Set[Vertex]:
    if n < 0:
        raise LatticeError("ball radius must be nonnegative")
    v = Vertex(*v)
    if domain is None or isinstance(domain, (Parallelogram, Box)):
        out = set()
        for dk in range(-n, n + 1):
            for dl in range(-n, n + 1):
                w = Vertex(v.k + dk, v.l + dl)
                if lattice_distance(v, w) <= n and _contains(domain, w):
                    out.add(w)
        return out
    return set(_bfs_distances([v], domain, limit=n))


def sphere(v: Vertex, n: int, domain: Domain = None) -> Set[Vertex]:
    if n == 0:
        return {Vertex(*v)} if _contains(domain, Vertex(*v)) else set()
    if domain is None or isinstance(domain, (Parallelogram, Box)):
        return {w for w in ball(v, n, domain) if lattice_distance(v, w) == n}
    return {w for w, d in _bfs_distances([v], domain, limit=n).items() if d == n}


def vertex_boundary(A: Iterable[Vertex]) -> Set[Vertex]:
    """Vertices of A with a lattice neighbour outside A."""
    A = {Vertex(*v) for v in A}
    return {v for v in A if any(w not in A for w in neighbors(v))}


def edge_boundary(A: Iterable[Vertex]) -> Set[Edge]:
    A = {Vertex(*v) for v in A}
    return {make_edge(v, w) for v in A for w in neighbors(v) if w not in A}


def distance_to_set(v: Vertex, targets: Iterable[Vertex]) -> int:
    return min(lattice_distance(v, t) for t in targets)


def neighborhood(sources: Iterable[Vertex], radius: int) -> Dict[Vertex, int]:
    """All lattice vertices within graph distance `radius` of the sources, with their distance."""
    return _bfs_distances(sources, None, limit=radius)


def reflect(v: Vertex) -> Vertex:
    """The diagonal automorphism (k, l) -> (l, k)."""
    return Vertex(v[1], v[0])


@dataclass(frozen=True)
class BarrierClassification:
    is_barrier: bool
    interior: FrozenSet[Vertex] = field(default_factory=frozenset)
    exterior: FrozenSet[Vertex] = field(default_factory=frozenset)
    reason: str = ""


def classify_barrier(E: Iterable[Edge], domain: Union[None, Parallelogram, Box] = None) -> BarrierClassification:
    """
    Decide whether removing the edges E (endpoints kept) leaves finite components.

    On the infinite lattice the search runs in the bounding parallelogram of
    the edge endpoints grown by one; its rim is never touched by E, so the
    component of the rim is the infinite one and the exterior is reported
    restricted to that window. On a Box or parallelogram domain the
    components touching the domain sides play the infinite role.
    """
    edges = {make_edge(*e) for e in E}
    if not edges:
        return BarrierClassification(False, reason="empty edge set")
    endpoints = [x for e in edges for x in e]
    if isinstance(domain, Box):
        domain = domain.outer

    if domain is None:
        window = Parallelogram(
            min(v.k for v in endpoints) - 1, max(v.k for v in endpoints) + 1,
            min(v.l for v in endpoints) - 1, max(v.l for v in endpoints) + 1,
        )
    else:
        if any(v not in domain for v in endpoints):
            return BarrierClassification(False, reason="edge set leaves the domain")
        if any(domain.on_sides(v) for v in endpoints):
            return BarrierClassification(False, reason="edge set touches the domain boundary")
        window = domain

    graph = nx.Graph()
    graph.add_nodes_from(window)
    for v in window:
        for dk, dl in FORWARD_OFFSETS:
            w = Vertex(v.k + dk, v.l + dl)
            if w in window and make_edge(v, w) not in edges:
                graph.add_edge(v, w)

    interior: Set[Vertex] = set()
    exterior: Set[Vertex] = set()
    unbounded = 0
    for component in nx.connected_components(graph):
        if any(window.on_sides(v) for v in component):
            unbounded += 1
            exterior |= component
        else:
            interior |= component
    if unbounded > 1:
        return BarrierClassification(False, reason="more than one unbounded component")
    if not interior:
        return BarrierClassification(False, frozenset(), frozenset(exterior), reason="no finite component")
    return BarrierClassification(True, frozenset(interior), frozenset(exterior))


def path_is_valid(path) -> bool:
    """Consecutive vertices adjacent and all vertices distinct."""
    if len(set(path)) != len(path):
        return False
    return all(are_adjacent(path[i], path[i + 1]) for i in range(len(path) - 1))
