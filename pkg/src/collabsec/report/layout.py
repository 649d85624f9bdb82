"""Kamada-Kawai style layout computed by stress majorization (SMACOF)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DisconnectedGraphError, EmptyNetworkError
from ..network import CollaborationNetwork, all_pairs_hops


@dataclass(frozen=True, eq=False)
class LayoutPositions:
    coordinates: np.ndarray  # (n, 2)
    stress_history: list[float] = field(default_factory=list)

    def __getitem__(self, node: int) -> tuple[float, float]:
        x, y = self.coordinates[node]
        return float(x), float(y)

    def __len__(self) -> int:
        return len(self.coordinates)


def stress(X: np.ndarray, D: np.ndarray, W: np.ndarray) -> float:
    """Weighted stress ``sum_{i<j} w_ij (|x_i - x_j| - d_ij)^2``."""
    dist = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=-1)
    return float(np.sum(np.triu(W * (dist - D) ** 2, k=1)))


def _target_distances(g: CollaborationNetwork) -> np.ndarray:
    D = np.array(all_pairs_hops(g), dtype=float)
    if (D < 0).any():
        raise DisconnectedGraphError("layout needs a connected graph")
    return D


def kamada_kawai_layout(
    g: CollaborationNetwork, tol: float = 1e-4, max_iters: int = 500
) -> LayoutPositions:
    """Place nodes so Euclidean distances approximate hop distances.

    Minimizes stress with Kamada-Kawai weights ``d_ij**-2`` using Guttman
    transform iterations from a circular start. Stops once the relative
    stress decrease falls below ``tol`` or after ``max_iters`` iterations.
    Majorization guarantees stress never increases between iterations.
    """
    n = g.n_nodes
    if n < 2:
        raise EmptyNetworkError("layout needs at least two nodes")
    D = _target_distances(g)
    W = np.zeros_like(D)
    off = ~np.eye(n, dtype=bool)
    W[off] = D[off] ** -2.0

    V = -W.copy()
    np.fill_diagonal(V, W.sum(axis=1))
    V_pinv = np.linalg.pinv(V)

    angles = 2.0 * np.pi * np.arange(n) / n
    radius = D.max() / 2.0
    X = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    current = stress(X, D, W)
    history = [current]
    for _ in range(max_iters):
        dist = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            B = np.where(dist > 0, -W * D / dist, 0.0)
        np.fill_diagonal(B, 0.0)
        np.fill_diagonal(B, -B.sum(axis=1))
        X = V_pinv @ B @ X
        new = stress(X, D, W)
        history.append(new)
        done = current == 0 or (current - new) / current < tol
        current = new
        if done:
            break
    X = X - X.mean(axis=0)
    return LayoutPositions(X, history)
