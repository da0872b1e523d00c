"""
Exact checks of the correlation inequalities behind the barrier argument,
run on tiny graphs through the ExactModel.

Every check returns a LemmaReport: the number of instantiated inequalities,
how many fail by more than the tolerance, and the worst instance found.
"""
import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from dacperc.config import (
    LEMMA_GRAPHS,
    LEMMA_MAX_INSTANCES,
    LEMMA_P_GRID,
    LEMMA_R_GRID,
    LEMMA_TOLERANCE,
)
from dacperc.core.lattice import FiniteGraph
from dacperc.models.rcm.exact import ExactModel, exact_distribution

FULL_EDGE_LIMIT = 5
FULL_VERTEX_LIMIT = 4


@dataclass
class LemmaReport:
    name: str
    graph: str
    p: Optional[float]
    r: Optional[float]
    instances: int = 0
    violations: int = 0
    min_margin: float = float("inf")
    worst: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_record(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "graph": self.graph,
            "p": self.p,
            "r": self.r,
            "instances": self.instances,
            "violations": self.violations,
            "min_margin": self.min_margin,
            "passed": self.passed,
            "worst": self.worst,
        }


class _Tally:
    def __init__(self, report: LemmaReport, tol: float):
        self.report = report
        self.tol = tol

    def add(self, margins: np.ndarray, context: Dict[str, Any], counts: Optional[np.ndarray] = None):
        margins = np.asarray(margins, dtype=float).ravel()
        if margins.size == 0:
            return
        counts = np.ones(margins.size, dtype=np.int64) if counts is None else np.asarray(counts, dtype=np.int64).ravel()
        rep = self.report
        rep.instances += int(counts.sum())
        rep.violations += int(counts[margins < -self.tol].sum())
        i = int(np.argmin(margins))
        if margins[i] < rep.min_margin:
            rep.min_margin = float(margins[i])
            rep.worst = {**context, "index": i}


def _submasks(model: ExactModel, mask: int) -> np.ndarray:
    full = (1 << model.n_edges) - 1
    return model.configs[(model.configs & np.uint64(full & ~mask)) == 0].astype(np.int64)


def _bits_of(mask: int) -> List[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _keyed(model: ExactModel, weights: np.ndarray, e: int, mask: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per pattern on `mask`: (weight with e open, total weight)."""
    keys = (model.configs & np.uint64(mask)).astype(np.int64)
    size = 1 << model.n_edges
    num = np.bincount(keys, weights=weights * model.open_bits(e), minlength=size)
    den = np.bincount(keys, weights=weights, minlength=size)
    return num, den


def _ratio(num: np.ndarray, den: np.ndarray, empty: float) -> np.ndarray:
    out = np.full(num.shape, empty)
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    return out


def _superset_transform(values: np.ndarray, sub: np.ndarray, mask: int, op) -> np.ndarray:
    out = values.copy()
    for f in _bits_of(mask):
        lo = sub[(sub >> f) & 1 == 0]
        out[lo] = op(out[lo], out[lo | (1 << f)])
    return out


def boundary_edges(graph: FiniteGraph, vertices: Iterable[int]) -> List[int]:
    """Edges of the graph with exactly one endpoint in the vertex set."""
    inside = np.zeros(graph.n_vertices, dtype=bool)
    inside[list(vertices)] = True
    return np.flatnonzero(inside[graph.edge_u] != inside[graph.edge_v]).tolist()


def connected_vertex_sets(graph: FiniteGraph, limit: Optional[int] = None,
                          rng: Optional[np.random.Generator] = None) -> List[Tuple[int, ...]]:
    g = nx.Graph()
    g.add_nodes_from(range(graph.n_vertices))
    g.add_edges_from(zip(graph.edge_u.tolist(), graph.edge_v.tolist()))
    out = []
    for size in range(1, graph.n_vertices + 1):
        for subset in itertools.combinations(range(graph.n_vertices), size):
            if nx.is_connected(g.subgraph(subset)):
                out.append(subset)
    if limit is not None and len(out) > limit:
        rng = rng or np.random.default_rng(0)
        keep = np.sort(rng.choice(len(out), size=limit, replace=False))
        out = [out[i] for i in keep]
    return out


def check_strong_fkg(model: ExactModel, name: str = "", tol: float = LEMMA_TOLERANCE,
                     rng: Optional[np.random.Generator] = None,
                     max_instances: int = LEMMA_MAX_INSTANCES) -> LemmaReport:
    """nu(eta(e)=1 | zeta on E) >= nu(eta(e)=1 | psi on E) for zeta >= psi; covering pairs suffice."""
    tally = _Tally(LemmaReport("strong-fkg", name, model.p, None), tol)
    m = model.n_edges
    rng = rng or np.random.default_rng(0)
    for e in range(m):
        rest = ((1 << m) - 1) & ~(1 << e)
        if m - 1 <= FULL_EDGE_LIMIT:
            masks = [mask for mask in range(1 << m) if mask & rest == mask]
        else:
            masks = [rest] + [int(x) & rest for x in rng.integers(0, 1 << m, size=max_instances // max(m, 1))]
        for mask in masks:
            num, den = _keyed(model, model.probs, e, mask)
            cond = _ratio(num, den, np.nan)
            sub = _submasks(model, mask)
            for f in _bits_of(mask):
                lo = sub[(sub >> f) & 1 == 0]
                hi = lo | (1 << f)
                ok = (den[lo] > 0) & (den[hi] > 0)
                tally.add(cond[hi[ok]] - cond[lo[ok]], {"e": e, "E": mask, "flip": f})
    return tally.report


def _edge_roles(model: ExactModel, e: int, with_closed: bool, full: bool,
                rng: np.random.Generator, count: int):
    """Yield (E mask, F mask) pairs avoiding e."""
    others = [f for f in range(model.n_edges) if f != e]
    choices = (0, 1, 2) if with_closed else (0, 1)
    if full:
        for roles in itertools.product(choices, repeat=len(others)):
            yield (sum(1 << f for f, k in zip(others, roles) if k == 1),
                   sum(1 << f for f, k in zip(others, roles) if k == 2))
    else:
        for _ in range(count):
            roles = rng.choice(choices, size=len(others))
            yield (sum(1 << f for f, k in zip(others, roles) if k == 1),
                   sum(1 << f for f, k in zip(others, roles) if k == 2))


def check_edge_dominance(model: ExactModel, r: float, with_closed: bool = False, name: str = "",
                         tol: float = LEMMA_TOLERANCE, rng: Optional[np.random.Generator] = None,
                         max_instances: int = LEMMA_MAX_INSTANCES) -> LemmaReport:
    """
    P(eta(e)=1 | A_g, I) >= P(eta(e)=1 | A_s [, C(F)]) for g >= s on E.

    Given eta, I (all of V has spin kappa) has probability c^{n_V(eta)} with
    c = r for kappa = +1 and 1 - r for kappa = -1.
    """
    label = "edge-dominance-closed" if with_closed else "edge-dominance"
    tally = _Tally(LemmaReport(label, name, model.p, r), tol)
    rng = rng or np.random.default_rng(0)
    m, n = model.n_edges, model.n_vertices
    full = m <= FULL_EDGE_LIMIT and n <= FULL_VERTEX_LIMIT

    if full:
        cases = [(vs, kappa, e)
                 for size in range(1, n + 1) for vs in itertools.combinations(range(n), size)
                 for kappa in (1, -1) for e in range(m)]
        per_case = None
    else:
        per_case = max(1, max_instances // 50)
        cases = []
        for _ in range(50):
            size = int(rng.integers(1, n + 1))
            vs = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
            cases.append((vs, int(rng.choice((1, -1))), int(rng.integers(0, m))))

    for vs, kappa, e in cases:
        c = r if kappa > 0 else 1.0 - r
        weights_i = model.probs * np.power(c, model.clusters_meeting(vs))
        for mask_e, mask_f in _edge_roles(model, e, with_closed, full, rng, per_case or 0):
            num_g, den_g = _keyed(model, weights_i, e, mask_e)
            rhs_weights = model.probs
            if mask_f:
                rhs_weights = model.probs * ((model.configs & np.uint64(mask_f)) == 0)
            num_s, den_s = _keyed(model, rhs_weights, e, mask_e)
            sub = _submasks(model, mask_e)
            lhs = _ratio(num_g, den_g, np.inf)
            best = _superset_transform(lhs, sub, mask_e, np.minimum)
            valid_g = (den_g > 0).astype(float)
            pairs = _superset_transform(valid_g, sub, mask_e, np.add)
            ok = (den_s[sub] > 0) & (pairs[sub] > 0)
            s = sub[ok]
            tally.add(best[s] - num_s[s] / den_s[s],
                      {"V": list(vs), "kappa": kappa, "e": e, "E": mask_e, "F": mask_f},
                      counts=pairs[s])
    return tally.report


def _spin_distribution(joint: np.ndarray, rows: Optional[np.ndarray], cols: Optional[np.ndarray]) -> Optional[np.ndarray]:
    table = joint if rows is None else joint[rows]
    mu = table.sum(axis=0)
    if cols is not None:
        mu = np.where(cols, mu, 0.0)
    total = mu.sum()
    if total <= 0.0:
        return None
    return mu / total


def _spin_superset_sum(model: ExactModel, mu: np.ndarray) -> np.ndarray:
    out = mu.copy()
    codes = model.spin_codes.astype(np.int64)
    for i in range(model.n_vertices):
        lo = codes[(codes >> i) & 1 == 0]
        out[lo] += out[lo | (1 << i)]
    return out


def _spin_subset_sum(model: ExactModel, mu: np.ndarray) -> np.ndarray:
    out = mu.copy()
    codes = model.spin_codes.astype(np.int64)
    for i in range(model.n_vertices):
        hi = codes[(codes >> i) & 1 == 1]
        out[hi] += out[hi ^ (1 << i)]
    return out


def _increasing_probabilities(model: ExactModel, mu: np.ndarray) -> Dict[str, np.ndarray]:
    """
    For every vertex set S (as a spin code): P(all of S plus), P(some of S plus),
    and, on parallelogram graphs, the plus-crossing probabilities.
    """
    full = (1 << model.n_vertices) - 1
    codes = model.spin_codes.astype(np.int64)
    families = {
        "all-plus": _spin_superset_sum(model, mu),
        "some-plus": 1.0 - _spin_subset_sum(model, mu)[full ^ codes],
    }
    for direction, table in _crossing_tables(model).items():
        families[f"{direction}-plus-crossing"] = np.array([float(mu[table].sum())])
    return families


def _crossing_tables(model: ExactModel) -> Dict[str, np.ndarray]:
    region = model.graph.region
    if region is None:
        return {}
    view = model.graph.view(region)
    g = nx.Graph()
    g.add_nodes_from(range(model.n_vertices))
    g.add_edges_from(zip(model.graph.edge_u.tolist(), model.graph.edge_v.tolist()))
    sides = {"horizontal": (view.left, view.right), "vertical": (view.top, view.bottom)}
    out = {}
    for direction, (start, end) in sides.items():
        hits = np.zeros(model.spin_codes.size, dtype=bool)
        for code, spins in enumerate(model.spin_vectors):
            plus = spins > 0
            sub = g.subgraph(np.flatnonzero(plus).tolist())
            targets = set(np.flatnonzero(end & plus).tolist())
            for s in np.flatnonzero(start & plus).tolist():
                if targets & nx.node_connected_component(sub, s):
                    hits[code] = True
                    break
        out[direction] = hits
    return out


def check_barrier_increase(model: ExactModel, r: float, exterior_only: bool = False, name: str = "",
                           tol: float = LEMMA_TOLERANCE) -> LemmaReport:
    """
    For connected V with edge boundary B and I = {all of V minus}:
    P(D | C(B)) >= P(D | I) for increasing D, and, for increasing D depending
    only on spins outside V, P(D | C(B), I) >= P(D | I).
    """
    label = "barrier-increase-exterior" if exterior_only else "barrier-increase"
    tally = _Tally(LemmaReport(label, name, model.p, r), tol)
    joint = model.joint(r)
    codes = model.spin_codes.astype(np.int64)

    for vs in connected_vertex_sets(model.graph):
        v_mask = sum(1 << v for v in vs)
        b_mask = sum(1 << e for e in boundary_edges(model.graph, vs))
        closed = (model.configs & np.uint64(b_mask)) == 0
        all_minus = (codes & v_mask) == 0

        mu_i = _spin_distribution(joint, None, all_minus)
        mu_c = _spin_distribution(joint, closed, all_minus if exterior_only else None)
        if mu_i is None or mu_c is None:
            continue
        upper = _increasing_probabilities(model, mu_c)
        lower = _increasing_probabilities(model, mu_i)
        for family, values in upper.items():
            margins = values - lower[family]
            if exterior_only and family in ("all-plus", "some-plus"):
                margins = margins[(codes & v_mask) == 0]
            elif exterior_only:
                # crossing events read spins of V too
                continue
            tally.add(margins, {"V": list(vs), "B": b_mask, "family": family})
    return tally.report


def check_conditional_independence(model: ExactModel, r: float, name: str = "",
                                   tol: float = LEMMA_TOLERANCE) -> LemmaReport:
    """
    Given C(B) for B = edge boundary of a connected V, the edges and spins
    inside V are independent of the edges and spins outside. Margin is minus
    the largest deviation |P(a, b) - P(a) P(b)|.
    """
    tally = _Tally(LemmaReport("conditional-independence", name, model.p, r), tol)
    joint = model.joint(r)
    graph = model.graph
    n = model.n_vertices
    codes = model.spin_codes.astype(np.int64)
    full_v = (1 << n) - 1

    for vs in connected_vertex_sets(graph):
        if len(vs) == n:
            continue
        inside = np.zeros(n, dtype=bool)
        inside[list(vs)] = True
        v_mask = sum(1 << v for v in vs)
        int_mask = sum(1 << e for e in np.flatnonzero(inside[graph.edge_u] & inside[graph.edge_v]).tolist())
        ext_mask = sum(1 << e for e in np.flatnonzero(~inside[graph.edge_u] & ~inside[graph.edge_v]).tolist())
        b_mask = sum(1 << e for e in boundary_edges(graph, vs))

        closed = (model.configs & np.uint64(b_mask)) == 0
        table = joint[closed]
        total = table.sum()
        if total <= 0.0:
            continue
        table = table / total
        eta = model.configs[closed].astype(np.int64)
        a = ((eta & int_mask) << n)[:, None] | (codes & v_mask)[None, :]
        b = ((eta & ext_mask) << n)[:, None] | (codes & (full_v ^ v_mask))[None, :]
        keys_a, ia = np.unique(a.ravel(), return_inverse=True)
        keys_b, ib = np.unique(b.ravel(), return_inverse=True)
        cells = np.bincount(ia * keys_b.size + ib, weights=table.ravel(),
                            minlength=keys_a.size * keys_b.size).reshape(keys_a.size, keys_b.size)
        product = np.outer(cells.sum(axis=1), cells.sum(axis=0))
        tally.add(-np.abs(cells - product), {"V": list(vs), "B": b_mask})
    return tally.report


def check_p_monotonicity(graph: FiniteGraph, q: float = 2.0, p_grid: Sequence[float] = (),
                         name: str = "", tol: float = LEMMA_TOLERANCE) -> LemmaReport:
    """Exact edge marginals are nondecreasing in p."""
    grid = sorted(p_grid) or [i / 10 for i in range(1, 10)]
    tally = _Tally(LemmaReport("p-monotonicity", name, None, None), tol)
    previous = None
    for p in grid:
        marginals = exact_distribution(graph, p, q).edge_marginals()
        if previous is not None:
            tally.add(marginals - previous, {"p": p})
        previous = marginals
    return tally.report


@dataclass
class CouplingResult:
    lower: np.ndarray
    upper: np.ndarray
    order: List[int]

    @property
    def ordered(self) -> bool:
        return bool(np.all(self.lower <= self.upper))


def sequential_monotone_coupling(model: ExactModel, r: float, vertices: Sequence[int],
                                 uniforms: np.ndarray) -> CouplingResult:
    """
    Reveal edges one at a time with a shared uniform per edge. The lower
    configuration follows P(. | C(B)), B the edge boundary of the connected
    set, the upper one follows P(. | I), I = {all of the set minus}. The
    next edge is the first undetermined one (edges touching the set first)
    that shares a vertex with an upper-open edge, else the first undetermined.
    """
    graph = model.graph
    m = model.n_edges
    vs = [model.vertex_index(v) for v in vertices]
    b_mask = sum(1 << e for e in boundary_edges(graph, vs))
    weights_lower = model.probs * ((model.configs & np.uint64(b_mask)) == 0)
    weights_upper = model.probs * np.power(1.0 - r, model.clusters_meeting(vs))

    in_set = np.zeros(graph.n_vertices, dtype=bool)
    in_set[vs] = True
    touching = in_set[graph.edge_u] | in_set[graph.edge_v]
    fixed = [e for e in range(m) if touching[e]] + [e for e in range(m) if not touching[e]]

    lower = np.zeros(m, dtype=bool)
    upper = np.zeros(m, dtype=bool)
    rows_lower = np.ones(model.configs.size, dtype=bool)
    rows_upper = np.ones(model.configs.size, dtype=bool)
    upper_touched = np.zeros(graph.n_vertices, dtype=bool)
    undetermined = set(range(m))
    order: List[int] = []

    while undetermined:
        candidates = [e for e in fixed if e in undetermined]
        near = [e for e in candidates if upper_touched[graph.edge_u[e]] or upper_touched[graph.edge_v[e]]]
        e = near[0] if near else candidates[0]
        opened = model.open_bits(e)

        p_lower = weights_lower[rows_lower & opened].sum() / weights_lower[rows_lower].sum()
        p_upper = weights_upper[rows_upper & opened].sum() / weights_upper[rows_upper].sum()
        # strict: zero-probability states are never selected
        lower[e] = uniforms[e] < p_lower
        upper[e] = uniforms[e] < p_upper
        rows_lower &= opened == lower[e]
        rows_upper &= opened == upper[e]
        if upper[e]:
            upper_touched[graph.edge_u[e]] = True
            upper_touched[graph.edge_v[e]] = True
        undetermined.discard(e)
        order.append(e)

    return CouplingResult(lower=lower, upper=upper, order=order)


def check_coupling_order(model: ExactModel, r: float, name: str = "", trials: int = 20,
                         rng: Optional[np.random.Generator] = None, tol: float = LEMMA_TOLERANCE) -> LemmaReport:
    tally = _Tally(LemmaReport("coupling-order", name, model.p, r), tol)
    rng = rng or np.random.default_rng(0)
    for vs in connected_vertex_sets(model.graph, limit=LEMMA_MAX_INSTANCES // max(trials, 1), rng=rng):
        for t in range(trials):
            result = sequential_monotone_coupling(model, r, vs, rng.random(model.n_edges))
            margins = result.upper.astype(float) - result.lower.astype(float)
            tally.add(margins, {"V": list(vs), "trial": t})
    return tally.report


def run_suite(graphs: Sequence[str] = LEMMA_GRAPHS, p_grid: Sequence[float] = LEMMA_P_GRID,
              r_grid: Sequence[float] = LEMMA_R_GRID, q: float = 2.0, seed: int = 0,
              tol: float = LEMMA_TOLERANCE) -> List[LemmaReport]:
    reports: List[LemmaReport] = []
    for g_index, name in enumerate(graphs):
        graph = FiniteGraph.named(name)
        reports.append(check_p_monotonicity(graph, q, name=name, tol=tol))
        for p_index, p in enumerate(p_grid):
            model = exact_distribution(graph, p, q)
            rng = np.random.default_rng([seed, g_index, p_index])
            reports.append(check_strong_fkg(model, name, tol, rng))
            for r in r_grid:
                reports.append(check_edge_dominance(model, r, False, name, tol, rng))
                reports.append(check_edge_dominance(model, r, True, name, tol, rng))
                reports.append(check_barrier_increase(model, r, False, name, tol))
                reports.append(check_barrier_increase(model, r, True, name, tol))
                reports.append(check_conditional_independence(model, r, name, tol))
                reports.append(check_coupling_order(model, r, name, rng=rng, tol=tol))
    return reports
