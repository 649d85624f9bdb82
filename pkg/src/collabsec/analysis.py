"""Network characterization: maximum spanning tree and fluid communities."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedGraphError
from .network import CollaborationEdge, CollaborationNetwork

DEFAULT_COMMUNITIES = 10


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by rank."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of ``a`` and ``b``; False if already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


@dataclass(frozen=True)
class SpanningTree:
    edges: tuple[CollaborationEdge, ...]
    total_weight: int

    def degrees(self, n_nodes: int) -> list[int]:
        """Tree degree of every node; the hubs of the collaboration backbone."""
        deg = [0] * n_nodes
        for e in self.edges:
            deg[e.u] += 1
            deg[e.v] += 1
        return deg

    def as_dict(self, n_nodes: int) -> dict:
        return {
            "total_weight": self.total_weight,
            "edges": [{"u": e.u, "v": e.v, "weight": e.weight} for e in self.edges],
            "tree_degree": self.degrees(n_nodes),
        }


def maximum_spanning_tree(g: CollaborationNetwork) -> SpanningTree:
    """Kruskal's algorithm run on edges in decreasing weight order.

    Equal weights are broken by ``(smaller endpoint, larger endpoint)``
    ascending, so the tree is fully determined by the graph.
    """
    if g.n_nodes == 0:
        raise DisconnectedGraphError("empty graph has no spanning tree")
    order = sorted(g.edges, key=lambda e: (-e.weight, *e.key))
    uf = UnionFind(g.n_nodes)
    chosen = []
    for e in order:
        if uf.union(e.u, e.v):
            chosen.append(e)
            if len(chosen) == g.n_nodes - 1:
                break
    if len(chosen) != g.n_nodes - 1:
        raise DisconnectedGraphError("graph is not connected")
    return SpanningTree(tuple(chosen), sum(e.weight for e in chosen))


@dataclass(frozen=True)
class CommunityPartition:
    assignment: tuple[int, ...]
    k: int
    passes: int = 0

    def members(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.k)]
        for v, c in enumerate(self.assignment):
            groups[c].append(v)
        return groups

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "assignment": {str(v): c for v, c in enumerate(self.assignment)},
        }


def fluid_communities(
    g: CollaborationNetwork,
    k: int = DEFAULT_COMMUNITIES,
    seed: int | None = 0,
    max_iters: int = 100,
) -> CommunityPartition:
    """Fluid Communities detection (Parés et al., 2017); edge weights ignored.

    ``k`` seed vertices each start a community of density 1. Vertices are
    then visited in a fresh random order per pass and adopt the community
    with the largest summed density ``1/|c|`` over themselves and their
    neighbours. Densities update immediately. A vertex keeps its community
    when it is among the maximizers and never leaves a community of which it
    is the only member. Stops after a pass with no change or ``max_iters``
    passes.
    """
    n = g.n_nodes
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k!r}")
    if not g.is_connected():
        raise DisconnectedGraphError("fluid communities need a connected graph")
    rng = np.random.default_rng(seed)
    adjacency = g.adjacency
    community = [-1] * n
    size = [0] * k
    for c, v in enumerate(rng.choice(n, size=k, replace=False)):
        community[int(v)] = c
        size[c] = 1

    order = np.arange(n)
    passes = 0
    changed = True
    while (changed and passes < max_iters) or -1 in community:
        changed = False
        passes += 1
        rng.shuffle(order)
        for v in order.tolist():
            current = community[v]
            if current >= 0 and size[current] == 1:
                continue
            score: Counter[int] = Counter()
            if current >= 0:
                score[current] += 1.0 / size[current]
            for u in adjacency[v]:
                c = community[u]
                if c >= 0:
                    score[c] += 1.0 / size[c]
            if not score:
                continue
            best = max(score.values())
            candidates = sorted(c for c, s in score.items() if best - s < 1e-9)
            if current in candidates:
                continue
            new = candidates[int(rng.integers(len(candidates)))]
            if current >= 0:
                size[current] -= 1
            community[v] = new
            size[new] += 1
            changed = True
    return CommunityPartition(tuple(community), int(k), passes)
