"""Discrete-time SEIR attack propagation over a collaboration network.

Nodes whose breach count exceeds a threshold start Exposed, a share of them
is promoted to Infected, and the attack spreads along collaboration edges.
All nodes update synchronously from the previous iteration's snapshot.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import IntEnum
from typing import IO, NamedTuple, Sequence

import numpy as np

from .errors import NoSeedError
from .network import CollaborationNetwork


class Compartment(IntEnum):
    SUSCEPTIBLE = 0
    EXPOSED = 1
    INFECTED = 2
    REMOVED = 3


S, E, I, R = (int(c) for c in Compartment)


@dataclass(frozen=True)
class SeirConfig:
    threshold: int = 1
    initial_infected_fraction: float = 0.4
    alpha: float = 0.05
    beta: float = 0.2
    gamma: float = 0.3
    iterations: int = 80
    runs: int = 10
    master_seed: int = 0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "initial_infected_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if self.runs < 1:
            raise ValueError("runs must be positive")


class IterationCounts(NamedTuple):
    t: int
    s: int
    e: int
    i: int
    r: int


@dataclass(frozen=True, eq=False)
class SimulationTrace:
    run_id: int
    counts: np.ndarray  # (iterations + 1, 4) compartment sizes
    ever_infected: frozenset[int]
    history: np.ndarray | None = None  # (iterations + 1, n) states, debug only

    @property
    def rows(self) -> list[IterationCounts]:
        return [IterationCounts(t, *map(int, row)) for t, row in enumerate(self.counts)]

    @property
    def n_nodes(self) -> int:
        return int(self.counts[0].sum())


def run_rng(master_seed: int, run_id: int) -> np.random.Generator:
    """Independent generator for one run, derived from a hash of both ids."""
    digest = hashlib.blake2b(f"{master_seed}:{run_id}".encode(), digest_size=16)
    return np.random.default_rng(int.from_bytes(digest.digest(), "little"))


def seed_states(
    g: CollaborationNetwork, config: SeirConfig, rng: np.random.Generator
) -> np.ndarray:
    """Initial compartments from breach counts.

    Nodes with more than ``config.threshold`` breaches start Exposed, all
    others Susceptible. Exactly ``max(1, floor(fraction * |exposed|))`` of the
    exposed nodes are then promoted to Infected: one picked uniformly, the
    rest sampled without replacement from the remainder.
    """
    exposed = np.array(
        [n.id for n in g.nodes if n.breach_count > config.threshold], dtype=np.intp
    )
    if exposed.size == 0:
        raise NoSeedError(
            f"no node has more than {config.threshold} breaches; nothing to seed"
        )
    states = np.full(g.n_nodes, S, dtype=np.int8)
    states[exposed] = E
    first = int(rng.choice(exposed))
    quota = max(1, math.floor(config.initial_infected_fraction * exposed.size))
    rest = exposed[exposed != first]
    extra = rng.choice(rest, size=quota - 1, replace=False) if quota > 1 else []
    states[first] = I
    states[extra] = I
    return states


def step(
    g: CollaborationNetwork,
    states: np.ndarray,
    config: SeirConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """One synchronous iteration.

    A Susceptible node with ``m`` Infected neighbours becomes Exposed with
    probability ``1 - (1 - beta)**m``; Exposed become Infected with
    probability ``alpha``; Infected become Removed with probability
    ``gamma``. One uniform draw per node per iteration.
    """
    src, dst = g.edge_index
    infected = (states == I).astype(np.float64)
    pressure = np.bincount(dst, weights=infected[src], minlength=g.n_nodes)
    p_expose = 1.0 - (1.0 - config.beta) ** pressure
    draw = rng.random(g.n_nodes)
    new = states.copy()
    new[(states == S) & (draw < p_expose)] = E
    new[(states == E) & (draw < config.alpha)] = I
    new[(states == I) & (draw < config.gamma)] = R
    return new


def _counts(states: np.ndarray) -> np.ndarray:
    return np.bincount(states, minlength=4)


def run_once(
    g: CollaborationNetwork,
    config: SeirConfig,
    run_id: int = 0,
    *,
    initial: np.ndarray | None = None,
    record_history: bool = False,
) -> SimulationTrace:
    rng = run_rng(config.master_seed, run_id)
    if initial is None:
        states = seed_states(g, config, rng)
    else:
        states = np.asarray(initial, dtype=np.int8).copy()
        if states.shape != (g.n_nodes,):
            raise ValueError("initial states must cover every node")
    counts = np.empty((config.iterations + 1, 4), dtype=np.int64)
    history = (
        np.empty((config.iterations + 1, g.n_nodes), dtype=np.int8)
        if record_history
        else None
    )
    ever = states == I
    counts[0] = _counts(states)
    if history is not None:
        history[0] = states
    for t in range(1, config.iterations + 1):
        states = step(g, states, config, rng)
        ever |= states == I
        counts[t] = _counts(states)
        if history is not None:
            history[t] = states
    return SimulationTrace(
        run_id, counts, frozenset(np.flatnonzero(ever).tolist()), history
    )


def run(
    g: CollaborationNetwork,
    config: SeirConfig,
    *,
    workers: int = 1,
    initial: np.ndarray | None = None,
    record_history: bool = False,
) -> list[SimulationTrace]:
    """``config.runs`` independent runs, ordered by run id.

    Each run draws from its own generator, so results do not depend on
    ``workers`` or on completion order.
    """

    def one(run_id: int) -> SimulationTrace:
        return run_once(
            g, config, run_id, initial=initial, record_history=record_history
        )

    g.edge_index  # build the shared cache before any worker touches it
    if workers <= 1:
        return [one(j) for j in range(config.runs)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(config.runs)))


@dataclass(frozen=True, eq=False)
class DiffusionTrends:
    fractions: np.ndarray  # (iterations + 1, 4) mean share per compartment

    @property
    def susceptible(self) -> np.ndarray:
        return self.fractions[:, S]

    @property
    def exposed(self) -> np.ndarray:
        return self.fractions[:, E]

    @property
    def infected(self) -> np.ndarray:
        return self.fractions[:, I]

    @property
    def removed(self) -> np.ndarray:
        return self.fractions[:, R]

    def __len__(self) -> int:
        return len(self.fractions)


def aggregate_trends(traces: Sequence[SimulationTrace]) -> DiffusionTrends:
    """Mean fraction of nodes per compartment at each iteration."""
    if not traces:
        raise ValueError("need at least one trace")
    lengths = {len(tr.counts) for tr in traces}
    if len(lengths) != 1:
        raise ValueError(f"traces have different lengths: {sorted(lengths)}")
    stacked = np.stack([tr.counts / tr.counts.sum(axis=1, keepdims=True) for tr in traces])
    return DiffusionTrends(stacked.mean(axis=0))


@dataclass(frozen=True)
class VulnerabilityReport:
    ratio: tuple[float, ...]

    @property
    def never_infected_fraction(self) -> float:
        """Share of nodes that escaped infection, averaged over runs."""
        return 1.0 - sum(self.ratio) / len(self.ratio)


def vulnerability(traces: Sequence[SimulationTrace], n_nodes: int) -> VulnerabilityReport:
    """Per node, the fraction of runs in which it was ever Infected."""
    if not traces:
        raise ValueError("need at least one trace")
    hits = np.zeros(n_nodes, dtype=np.int64)
    for tr in traces:
        hits[list(tr.ever_infected)] += 1
    return VulnerabilityReport(tuple((hits / len(traces)).tolist()))


# -- file formats ------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.10f}"


def write_trends_csv(trends: DiffusionTrends, fp: IO[str]) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(["t", "s_mean", "e_mean", "i_mean", "r_mean"])
    for t, row in enumerate(trends.fractions):
        w.writerow([t, *map(_fmt, row)])


def read_trends_csv(fp: IO[str]) -> DiffusionTrends:
    rows = list(csv.DictReader(fp))
    if not rows:
        raise ValueError("empty trends file")
    data = [[float(r[c]) for c in ("s_mean", "e_mean", "i_mean", "r_mean")] for r in rows]
    return DiffusionTrends(np.array(data))


def write_trace_csv(trace: SimulationTrace, fp: IO[str]) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(["t", "s", "e", "i", "r"])
    for row in trace.rows:
        w.writerow(row)


def vulnerability_to_dict(
    report: VulnerabilityReport, g: CollaborationNetwork, redact: bool = False
) -> dict[str, float]:
    """``{node id: ratio}``, or keyed by email digest when ``redact``."""
    if redact:
        return {n.email.digest(): report.ratio[n.id] for n in g.nodes}
    return {str(n.id): report.ratio[n.id] for n in g.nodes}


def vulnerability_from_dict(data: dict, g: CollaborationNetwork) -> VulnerabilityReport:
    by_digest = {n.email.digest(): n.id for n in g.nodes}
    ratio = [0.0] * g.n_nodes
    seen = set()
    for key, value in data.items():
        node = by_digest[key] if key in by_digest else int(key)
        ratio[node] = float(value)
        seen.add(node)
    if len(seen) != g.n_nodes:
        raise ValueError("vulnerability file does not cover every node")
    return VulnerabilityReport(tuple(ratio))


def write_vulnerability_json(
    report: VulnerabilityReport, g: CollaborationNetwork, fp: IO[str], redact: bool = False
) -> None:
    json.dump(vulnerability_to_dict(report, g, redact), fp, indent=1)
    fp.write("\n")
