import numpy as np

MASK64 = (1 << 64) - 1

CHAIN_DOMAIN = 1
MARK_DOMAIN = 2
BOOTSTRAP_DOMAIN = 3


class StreamManager:
    """
    Counter-based random streams (numpy Philox 4x64).

    The 128-bit key is (seed, domain << 56 | index), where index is the chain
    index for sampler streams and the sample id for cluster marks. The
    highest counter word holds the sweep number, so every sweep of a chain
    reads its own counter block: edge uniforms first (in edge order), then
    vertex uniforms (in row-major vertex order).
    """

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must fit in 64 bits")
        self.seed = int(seed)

    def _generator(self, domain: int, index: int, block: int = 0) -> np.random.Generator:
        key = np.array([self.seed, ((domain << 56) | index) & MASK64], dtype=np.uint64)
        counter = np.array([0, 0, 0, block], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(counter=counter, key=key))

    def sweep_uniforms(self, chain: int, sweep: int, n_edges: int, n_vertices: int):
        """Uniforms for one Swendsen-Wang sweep: (edge uniforms, vertex uniforms)."""
        u = self._generator(CHAIN_DOMAIN, chain, sweep).random(n_edges + n_vertices)
        return u[:n_edges], u[n_edges:]

    def cluster_marks(self, sample_id: int, n_vertices: int) -> np.ndarray:
        """One uniform per vertex; a cluster's mark is the entry at its identifier vertex."""
        return self._generator(MARK_DOMAIN, sample_id).random(n_vertices)

    def bootstrap_generator(self, tag: int = 0) -> np.random.Generator:
        return self._generator(BOOTSTRAP_DOMAIN, tag)
