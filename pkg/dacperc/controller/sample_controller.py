from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from dacperc.core.helpers import fmt
from dacperc.core.lattice import Box, Parallelogram
from dacperc.core.managers.stream_manager import StreamManager
from dacperc.models.dac import DacSample, color
from dacperc.models.rcm.params import EdgeConfig, RcmParams
from dacperc.models.rcm.sampler import run_chain


@dataclass
class SampleDump:
    header: str
    edge_lines: List[str] = field(default_factory=list)
    spin_blocks: List[List[str]] = field(default_factory=list)
    mark_rows: List[Tuple[int, int, int, float]] = field(default_factory=list)

    def edges_text(self) -> str:
        return "\n".join([self.header, *self.edge_lines]) + "\n"

    def spins_text(self) -> str:
        lines = [self.header]
        for i, rows in enumerate(self.spin_blocks):
            lines.append(f"# sample={i}")
            lines.extend(rows)
        return "\n".join(lines) + "\n"


def dump_header(box: Box, beta: float, seed: int, burn_in: int, thin: int, r: Optional[float] = None) -> str:
    parts = [
        f"box={box.outer.literal()}",
        f"buffer={box.buffer}",
        f"beta={fmt(beta)}",
        f"seed={seed}",
        f"burn_in={burn_in}",
        f"thin={thin}",
    ]
    if r is not None:
        parts.append(f"r={fmt(r)}")
    return "# " + " ".join(parts)


def dump_samples(
    inner: Parallelogram,
    beta: float,
    count: int,
    seed: int,
    burn_in: int,
    thin: int,
    buffer: int = 0,
    r: Optional[float] = None,
) -> SampleDump:
    """
    count configurations of chain 0, one RLE line each. With r, also the
    coloured spin rows and the cluster-mark table (sample, cluster, size, mark).
    """
    box = Box.around(inner, buffer)
    graph = box.graph
    stream = StreamManager(seed)
    dump = SampleDump(header=dump_header(box, beta, seed, burn_in, thin, r))

    def on_sample(bonds: np.ndarray, j: int):
        eta = EdgeConfig(graph, bonds.astype(np.uint8))
        dump.edge_lines.append(eta.to_rle())
        if r is not None:
            sample = DacSample.draw(eta, stream, j)
            dump.spin_blocks.append(color(sample, r).to_rows())
            sizes = sample.labeling.sizes
            for root, mark in sample.cluster_marks().items():
                dump.mark_rows.append((j, root, sizes[root], mark))
        return None

    run_chain(box, RcmParams(beta), burn_in, thin, count, seed, chain=0, measure=on_sample)
    return dump
