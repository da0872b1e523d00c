import numpy as np


class UnionFind:
    """ Disjoint sets over 0..size-1 with path compression and union by size """

    def __init__(self, size: int):
        self.size = size
        # initially all elements disconnected
        self.parents = np.arange(size, dtype=np.int64)
        self.sizes = np.ones(size, dtype=np.int64)
        self.num_components = size

    def find(self, elem: int) -> int:
        parents = self.parents
        p = elem
        while p != parents[p]:
            p = parents[p]
        # compress the path taken
        while elem != p:
            nxt = parents[elem]
            parents[elem] = p
            elem = nxt
        return int(p)

    def union(self, a: int, b: int) -> int:
        p1 = self.find(a)
        p2 = self.find(b)
        if p1 == p2:
            return p1
        if self.sizes[p1] < self.sizes[p2]:
            p1, p2 = p2, p1
        self.parents[p2] = p1
        self.sizes[p1] += self.sizes[p2]
        self.num_components -= 1
        return p1

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)
