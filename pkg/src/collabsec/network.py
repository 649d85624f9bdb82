"""Collaboration network data model, construction and descriptive metrics.

A collaboration network is an undirected simple graph whose vertices are the
institutional email addresses of researchers and whose edge weights count the
papers two addresses co-occur in.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter, deque
from dataclasses import dataclass, replace
from functools import cached_property
from itertools import combinations
from typing import IO, Iterable, Mapping, Sequence

from .errors import DisconnectedGraphError, EmptyNetworkError

_LOCAL_RE = re.compile(r"^[a-z0-9._%+-]+$")
_DOMAIN_RE = re.compile(r"^[a-z0-9-]+(?:\.[a-z0-9-]+)+$")


@dataclass(frozen=True, order=True)
class EmailIdentity:
    local: str
    domain: str

    def __post_init__(self):
        if not _LOCAL_RE.match(self.local):
            raise ValueError(f"invalid local part: {self.local!r}")
        if not _DOMAIN_RE.match(self.domain):
            raise ValueError(f"invalid domain: {self.domain!r}")

    @classmethod
    def parse(cls, text: str) -> "EmailIdentity":
        """Normalize (strip, lowercase) and validate an address.

        Raises ``ValueError`` for anything that is not ``local@domain``.
        """
        text = text.strip().lower()
        local, sep, domain = text.rpartition("@")
        if not sep:
            raise ValueError(f"not an email address: {text!r}")
        return cls(local, domain)

    def __str__(self) -> str:
        return f"{self.local}@{self.domain}"

    def digest(self) -> str:
        """Stable pseudonym used when exports are redacted."""
        return hashlib.sha256(str(self).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ResearcherNode:
    id: int
    email: EmailIdentity
    breach_count: int = 0
    services: frozenset[str] = frozenset()


@dataclass(frozen=True)
class CollaborationEdge:
    u: int
    v: int
    weight: int = 1

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError("self-loops are not allowed")
        if self.weight < 1:
            raise ValueError("edge weight must be >= 1")

    @property
    def key(self) -> tuple[int, int]:
        return (min(self.u, self.v), max(self.u, self.v))


@dataclass(frozen=True)
class CollaborationNetwork:
    """Immutable undirected weighted collaboration graph.

    Node ids are dense (``0..n-1``) and equal to the node's position in
    ``nodes``. Edges are stored with ``u < v`` and sorted.
    """

    nodes: tuple[ResearcherNode, ...]
    edges: tuple[CollaborationEdge, ...]
    target_domain: str

    def __post_init__(self):
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise ValueError("node ids must be contiguous from 0")
            if node.email.domain != self.target_domain:
                raise ValueError(f"{node.email} is outside {self.target_domain}")
        seen = set()
        n = len(self.nodes)
        for e in self.edges:
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise ValueError(f"edge ({e.u}, {e.v}) references a missing node")
            if e.key in seen:
                raise ValueError(f"duplicate edge {e.key}")
            seen.add(e.key)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbour ids per node."""
        adj: list[list[int]] = [[] for _ in self.nodes]
        for e in self.edges:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edge_index(self):
        """``(src, dst)`` int arrays listing every edge in both orientations."""
        import numpy as np

        u = np.fromiter((e.u for e in self.edges), dtype=np.intp, count=self.n_edges)
        v = np.fromiter((e.v for e in self.edges), dtype=np.intp, count=self.n_edges)
        return np.concatenate([u, v]), np.concatenate([v, u])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def components(self) -> list[list[int]]:
        """Connected components as sorted id lists, ordered by smallest member."""
        seen = [False] * self.n_nodes
        comps = []
        for start in range(self.n_nodes):
            if seen[start]:
                continue
            seen[start] = True
            comp = [start]
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for y in self.adjacency[x]:
                    if not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n_nodes > 0 and len(self.components()) == 1

    def with_nodes(self, nodes: Sequence[ResearcherNode]) -> "CollaborationNetwork":
        """Copy with replaced node attributes (same ids, same edges)."""
        return CollaborationNetwork(tuple(nodes), self.edges, self.target_domain)


def make_network(
    emails: Sequence[EmailIdentity],
    weighted_pairs: Mapping[tuple[int, int], int],
    target_domain: str,
    breach_counts: Sequence[int] | None = None,
) -> CollaborationNetwork:
    """Assemble a network from an email list and ``{(u, v): weight}``."""
    counts = breach_counts if breach_counts is not None else [0] * len(emails)
    nodes = tuple(
        ResearcherNode(i, email, counts[i]) for i, email in enumerate(emails)
    )
    edges = tuple(
        CollaborationEdge(u, v, w)
        for (u, v), w in sorted(
            ((min(a, b), max(a, b)), w) for (a, b), w in weighted_pairs.items()
        )
    )
    return CollaborationNetwork(nodes, edges, target_domain)


def build_network(records: Iterable, target_domain: str) -> CollaborationNetwork:
    """Build the collaboration graph restricted to ``target_domain``.

    Each record contributes +1 to the weight of every unordered pair of
    distinct in-domain emails it lists. Node ids follow order of first
    appearance.
    """
    target_domain = target_domain.strip().lower()
    if not target_domain:
        raise ValueError("target_domain must be non-empty")
    index: dict[EmailIdentity, int] = {}
    weights: Counter[tuple[int, int]] = Counter()
    for record in records:
        ids = []
        for email in record.emails:
            if email.domain != target_domain:
                continue
            if email not in index:
                index[email] = len(index)
            if index[email] not in ids:
                ids.append(index[email])
        for a, b in combinations(sorted(ids), 2):
            weights[(a, b)] += 1
    if not index:
        raise EmptyNetworkError(f"no email matches domain {target_domain!r}")
    return make_network(list(index), weights, target_domain)


def induced_subgraph(g: CollaborationNetwork, keep: Iterable[int]) -> CollaborationNetwork:
    """Subgraph on ``keep`` with ids re-densified in ascending original order."""
    old_ids = sorted(set(keep))
    remap = {old: new for new, old in enumerate(old_ids)}
    nodes = tuple(replace(g.nodes[old], id=new) for new, old in enumerate(old_ids))
    edges = tuple(
        CollaborationEdge(remap[e.u], remap[e.v], e.weight)
        for e in g.edges
        if e.u in remap and e.v in remap
    )
    return CollaborationNetwork(nodes, edges, g.target_domain)


def largest_component(g: CollaborationNetwork) -> CollaborationNetwork:
    """Induced subgraph on the largest connected component.

    Ties between equally large components go to the one holding the
    smallest original node id.
    """
    if g.n_nodes == 0:
        raise EmptyNetworkError("network has no nodes")
    comps = g.components()
    # components() is ordered by smallest member, so max() keeps the first tie
    best = max(comps, key=len)
    return induced_subgraph(g, best)


@dataclass(frozen=True)
class NetworkMetrics:
    n_nodes: int
    n_edges: int
    avg_clustering: float
    avg_shortest_path: float
    # None when endpoint degrees have zero variance (e.g. regular graphs)
    degree_assortativity: float | None

    @property
    def assortativity_defined(self) -> bool:
        return self.degree_assortativity is not None

    def as_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "n_edges": self.n_edges,
            "avg_clustering": self.avg_clustering,
            "avg_shortest_path": self.avg_shortest_path,
            "degree_assortativity": self.degree_assortativity,
            "assortativity_defined": self.assortativity_defined,
        }


def local_clustering(g: CollaborationNetwork) -> list[float]:
    adj_sets = [set(a) for a in g.adjacency]
    out = []
    for v, nbrs in enumerate(g.adjacency):
        d = len(nbrs)
        if d < 2:
            out.append(0.0)
            continue
        links = sum(1 for a, b in combinations(nbrs, 2) if b in adj_sets[a])
        out.append(2.0 * links / (d * (d - 1)))
    return out


def bfs_distances(g: CollaborationNetwork, source: int) -> list[int]:
    """Unweighted hop distances from ``source``; -1 marks unreachable nodes."""
    dist = [-1] * g.n_nodes
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in g.adjacency[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def all_pairs_hops(g: CollaborationNetwork) -> list[list[int]]:
    return [bfs_distances(g, s) for s in range(g.n_nodes)]


def average_shortest_path(g: CollaborationNetwork) -> float:
    n = g.n_nodes
    total = 0
    for s in range(n):
        dist = bfs_distances(g, s)
        if min(dist) < 0:
            raise DisconnectedGraphError("average shortest path needs a connected graph")
        total += sum(dist)
    return total / (n * (n - 1))


def degree_assortativity(g: CollaborationNetwork) -> float | None:
    """Pearson correlation of endpoint degrees, each edge taken both ways."""
    deg = g.degrees()
    xs = []
    ys = []
    for e in g.edges:
        xs += [deg[e.u], deg[e.v]]
        ys += [deg[e.v], deg[e.u]]
    m = len(xs)
    if m == 0:
        return None
    mx = sum(xs) / m
    my = sum(ys) / m
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = sum((x - mx) ** 2 for x in xs)
    vy = sum((y - my) ** 2 for y in ys)
    if vx == 0 or vy == 0:
        return None
    r = cov / (vx * vy) ** 0.5
    return max(-1.0, min(1.0, r))


def compute_metrics(g: CollaborationNetwork) -> NetworkMetrics:
    """Node/edge counts, mean clustering, mean hop distance and assortativity.

    Metrics ignore edge weights. The graph must be connected with at least
    two nodes; run :func:`largest_component` first on scraped data.
    """
    if g.n_nodes < 2:
        raise EmptyNetworkError("metrics need at least two nodes")
    if not g.is_connected():
        raise DisconnectedGraphError("metrics need a connected graph")
    cc = local_clustering(g)
    return NetworkMetrics(
        n_nodes=g.n_nodes,
        n_edges=g.n_edges,
        avg_clustering=sum(cc) / g.n_nodes,
        avg_shortest_path=average_shortest_path(g),
        degree_assortativity=degree_assortativity(g),
    )


def breach_histogram(g: CollaborationNetwork) -> dict[int, int]:
    counts = Counter(node.breach_count for node in g.nodes)
    return dict(sorted(counts.items()))


# -- persistence -------------------------------------------------------------


def network_to_dict(g: CollaborationNetwork) -> dict:
    return {
        "target_domain": g.target_domain,
        "nodes": [
            {
                "id": n.id,
                "email": str(n.email),
                "breach_count": n.breach_count,
                "services": sorted(n.services),
            }
            for n in g.nodes
        ],
        "edges": [{"u": e.u, "v": e.v, "weight": e.weight} for e in g.edges],
    }


def network_from_dict(data: Mapping) -> CollaborationNetwork:
    nodes = tuple(
        ResearcherNode(
            id=int(n["id"]),
            email=EmailIdentity.parse(n["email"]),
            breach_count=int(n.get("breach_count", 0)),
            services=frozenset(n.get("services", ())),
        )
        for n in data["nodes"]
    )
    edges = tuple(
        CollaborationEdge(int(e["u"]), int(e["v"]), int(e.get("weight", 1)))
        for e in data["edges"]
    )
    return CollaborationNetwork(nodes, edges, data["target_domain"])


def save_network(g: CollaborationNetwork, fp: IO[str]) -> None:
    json.dump(network_to_dict(g), fp, indent=1, sort_keys=True)
    fp.write("\n")


def load_network(fp: IO[str]) -> CollaborationNetwork:
    return network_from_dict(json.load(fp))


def node_label(node: ResearcherNode, redact: bool) -> str:
    return node.email.digest() if redact else str(node.email)


def to_networkx(g: CollaborationNetwork, redact: bool = False):
    import networkx as nx

    G = nx.Graph()
    for node in g.nodes:
        G.add_node(
            node.id, label=node_label(node, redact), breach_count=node.breach_count
        )
    for e in g.edges:
        G.add_edge(e.u, e.v, weight=e.weight)
    return G


def write_graphml(g: CollaborationNetwork, path, redact: bool = False) -> None:
    import networkx as nx

    nx.write_graphml(to_networkx(g, redact), path)


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(
    g: CollaborationNetwork,
    redact: bool = False,
    node_colors: Mapping[int, str] | None = None,
) -> str:
    lines = ["graph collaboration {"]
    for node in g.nodes:
        attrs = [
            f"label={_dot_quote(node_label(node, redact))}",
            f"breach_count={node.breach_count}",
        ]
        if node_colors is not None and node.id in node_colors:
            attrs += ["style=filled", f"fillcolor={_dot_quote(node_colors[node.id])}"]
        lines.append(f"  {node.id} [{', '.join(attrs)}];")
    for e in g.edges:
        lines.append(f"  {e.u} -- {e.v} [weight={e.weight}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
