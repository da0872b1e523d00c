from .errors import (
    DacpercError,
    ConfigError,
    OracleCapExceeded,
    PackingCapExceeded,
    SubcriticalityViolation,
    LatticeError,
    ZeroProbabilityCondition,
    ClusterEscapesBox,
    MalformedCrossing,
    NotDecreasingEvent,
)
from .lattice import (
    Vertex,
    Edge,
    Parallelogram,
    Box,
    FiniteGraph,
    neighbors,
    embed,
    graph_distance,
    ball,
    sphere,
    vertex_boundary,
    edge_boundary,
    classify_barrier,
    reflect,
)
from .union_find import UnionFind
