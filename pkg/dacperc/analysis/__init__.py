from .crossings import (
    CrossingSpec,
    SpinClusters,
    crossing_threshold,
    find_crossing,
    has_crossing,
    lowest_crossing,
    spin_clusters,
)
from .regions import CrossingRegions, FkHull, crossing_regions, fk_hull, q_condition
from .cutpoints import (
    CutPointReport,
    PivotalReport,
    RussoAudit,
    cut_points,
    packed_count,
    pivotal_clusters,
    russo_audit,
)
