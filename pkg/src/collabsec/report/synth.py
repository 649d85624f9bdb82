"""Synthetic collaboration networks for desk-scale experiments."""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ..errors import InfeasibleParametersError
from ..network import CollaborationNetwork, EmailIdentity, make_network

SYNTH_DOMAIN = "synth.example.org"
FITNESS_SIGMA = 0.6
SIMILARITY_STRENGTH = 4.0


def parse_breach_spec(text: str) -> dict[int, int]:
    """Parse ``"0:40,2:100,5:74"`` into ``{0: 40, 2: 100, 5: 74}``."""
    spec: dict[int, int] = {}
    for part in text.split(","):
        if not part.strip():
            continue
        count, _, nodes = part.partition(":")
        try:
            key, value = int(count), int(nodes)
        except ValueError:
            raise InfeasibleParametersError(f"bad breach spec entry {part!r}") from None
        if key < 0 or value < 0:
            raise InfeasibleParametersError(f"negative value in {part!r}")
        spec[key] = spec.get(key, 0) + value
    return spec


def synth_network(
    n: int,
    m: int,
    assortative_bias: float,
    breach_spec: Mapping[int, int],
    seed: int = 0,
    domain: str = SYNTH_DOMAIN,
) -> CollaborationNetwork:
    """Connected random graph with exactly ``n`` nodes and ``m`` edges.

    A random spanning tree guarantees connectivity. The remaining edges are
    drawn with probability proportional to ``f_a * f_b`` for lognormal node
    fitness ``f``, damped by fitness dissimilarity as the bias grows. Then
    degree-preserving swaps on the non-tree edges pair the two highest-degree
    endpoints with probability ``assortative_bias`` per swap
    (Xulvi-Brunet & Sokolov). Breach counts are dealt out from
    ``breach_spec`` (``{breach count: number of nodes}``).
    """
    if n < 1 or not n - 1 <= m <= n * (n - 1) // 2:
        raise InfeasibleParametersError(
            f"need n >= 1 and n-1 <= m <= n(n-1)/2, got n={n}, m={m}"
        )
    if not 0.0 <= assortative_bias <= 1.0:
        raise InfeasibleParametersError("assortative_bias must be in [0, 1]")
    if sum(breach_spec.values()) != n:
        raise InfeasibleParametersError(
            f"breach spec covers {sum(breach_spec.values())} nodes, expected {n}"
        )
    rng = np.random.default_rng(seed)
    fitness = np.exp(rng.normal(0.0, FITNESS_SIGMA, n))

    order = rng.permutation(n)
    tree: set[tuple[int, int]] = set()
    for k in range(1, n):
        w = fitness[order[:k]]
        parent = int(order[rng.choice(k, p=w / w.sum())])
        child = int(order[k])
        tree.add((min(parent, child), max(parent, child)))

    extra_needed = m - len(tree)
    extra: list[tuple[int, int]] = []
    if extra_needed:
        iu, ju = np.triu_indices(n, k=1)
        free = np.array([(a, b) not in tree for a, b in zip(iu.tolist(), ju.tolist())])
        iu, ju = iu[free], ju[free]
        log_fit = np.log(fitness)
        dissimilarity = np.abs(log_fit[iu] - log_fit[ju])
        p = fitness[iu] * fitness[ju] * np.exp(
            -SIMILARITY_STRENGTH * assortative_bias * dissimilarity
        )
        pick = rng.choice(len(iu), size=extra_needed, replace=False, p=p / p.sum())
        extra = sorted((int(iu[x]), int(ju[x])) for x in pick)

    degree = np.zeros(n, dtype=np.int64)
    for a, b in list(tree) + extra:
        degree[a] += 1
        degree[b] += 1
    edge_set = tree | set(extra)
    _rewire(extra, edge_set, degree, assortative_bias, rng)

    emails = [EmailIdentity(f"r{i:05d}", domain) for i in range(n)]
    weights = {e: int(rng.geometric(0.6)) for e in sorted(edge_set)}
    breaches = np.repeat(
        np.array(sorted(breach_spec), dtype=np.int64),
        [breach_spec[k] for k in sorted(breach_spec)],
    )
    breaches = rng.permutation(breaches)
    return make_network(emails, weights, domain, breaches.tolist())


def _rewire(edges, edge_set, degree, bias, rng, sweeps: int = 10) -> None:
    """Degree-preserving double-edge swaps, in place on ``edges``/``edge_set``."""
    if len(edges) < 2:
        return
    for _ in range(sweeps * len(edges)):
        i, j = rng.choice(len(edges), size=2, replace=False)
        (a, b), (c, d) = edges[i], edges[j]
        if len({a, b, c, d}) < 4:
            continue
        if rng.random() < bias:
            ranked = sorted((a, b, c, d), key=lambda x: (-degree[x], x))
            new1, new2 = (ranked[0], ranked[1]), (ranked[2], ranked[3])
        elif rng.random() < 0.5:
            new1, new2 = (a, c), (b, d)
        else:
            new1, new2 = (a, d), (b, c)
        new1 = (min(new1), max(new1))
        new2 = (min(new2), max(new2))
        if new1 in edge_set or new2 in edge_set:
            continue
        edge_set.discard(edges[i])
        edge_set.discard(edges[j])
        edge_set.add(new1)
        edge_set.add(new2)
        edges[i], edges[j] = new1, new2
