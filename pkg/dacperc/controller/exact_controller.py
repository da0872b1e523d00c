from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from dacperc.analysis.crossings import CrossingSpec
from dacperc.analysis.cutpoints import russo_audit
from dacperc.config import LEMMA_GRAPHS, LEMMA_P_GRID, LEMMA_R_GRID, RUSSO_DR
from dacperc.core.lattice import FiniteGraph
from dacperc.models.rcm.exact import Event, ExactModel, exact_dac_probability, exact_distribution
from dacperc.models.rcm.lemmas import LemmaReport, run_suite


def exact_tables(graph_name: str, p: float, q: float = 2.0, r: Optional[float] = None) -> Dict[str, Any]:
    """
    Oracle tables for a library graph: partition sum, per-edge marginals,
    every two-edge joint and, when r is given, spin pair probabilities.
    """
    graph = FiniteGraph.named(graph_name)
    model = exact_distribution(graph, p, q)
    marginals = model.edge_marginals()
    edges = [
        {"edge": [list(e.u), list(e.v)], "index": i, "marginal": float(marginals[i])}
        for i, e in enumerate(graph.edges())
    ]
    pairs = []
    for e, f in combinations(range(model.n_edges), 2):
        table = model.two_edge_joint(e, f)
        pairs.append({
            "e": e,
            "f": f,
            "closed_closed": float(table[0, 0]),
            "closed_open": float(table[0, 1]),
            "open_closed": float(table[1, 0]),
            "open_open": float(table[1, 1]),
            "covariance": float(table[1, 1] - marginals[e] * marginals[f]),
        })
    tables: Dict[str, Any] = {
        "graph": graph_name,
        "p": p,
        "q": q,
        "Z": model.Z,
        "total_probability": float(model.probs.sum()),
        "edges": edges,
        "pairs": pairs,
    }
    if r is not None:
        tables["r"] = r
        tables["spins"] = spin_pair_table(model, r)
    return tables


def spin_pair_table(model: ExactModel, r: float) -> List[Dict[str, Any]]:
    rows = []
    vertices = model.graph.vertices
    for i, j in combinations(range(model.n_vertices), 2):
        both = Event.spin_event(model, lambda s, i=i, j=j: s[i] > 0 and s[j] > 0)
        equal = Event.spins_equal(model, {vertices[i]: 1, vertices[j]: 1}) | \
            Event.spins_equal(model, {vertices[i]: -1, vertices[j]: -1})
        rows.append({
            "v": list(vertices[i]),
            "w": list(vertices[j]),
            "both_plus": exact_dac_probability(model, r, both),
            "equal": exact_dac_probability(model, r, equal),
        })
    return rows


def russo_events(graph: FiniteGraph) -> Dict[str, Any]:
    """Decreasing spin events available on a library graph."""
    events: Dict[str, Any] = {"all-minus": lambda s: bool(np.all(s < 0))}
    if graph.region is not None:
        events["H-"] = CrossingSpec(graph.region, "horizontal", -1)
        events["V-"] = CrossingSpec(graph.region, "vertical", -1)
    return events


def russo_suite(graph_name: str, p_grid: Sequence[float], r_grid: Sequence[float],
                dr: float = RUSSO_DR, q: float = 2.0) -> List[Dict[str, Any]]:
    graph = FiniteGraph.named(graph_name)
    rows = []
    for p in p_grid:
        model = exact_distribution(graph, p, q)
        for label, event in russo_events(graph).items():
            for r in r_grid:
                audit = russo_audit(model, event, r, dr)
                rows.append({
                    "graph": graph_name,
                    "p": p,
                    "r": r,
                    "event": label,
                    "lhs": audit.lhs,
                    "rhs": audit.rhs,
                    "difference": audit.difference,
                    "agrees": audit.agrees(),
                })
    return rows


def lemma_suite(graphs: Sequence[str] = LEMMA_GRAPHS, p_grid: Sequence[float] = LEMMA_P_GRID,
                r_grid: Sequence[float] = LEMMA_R_GRID, q: float = 2.0, seed: int = 0) -> List[LemmaReport]:
    return run_suite(graphs, p_grid, r_grid, q, seed)
