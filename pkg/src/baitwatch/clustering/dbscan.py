"""Deterministic density clustering under Euclidean distance.

Points are processed in sha256 order regardless of input order, so the
partition (and its numbering) is a pure function of the point set. A point's
eps-neighborhood includes the point itself; noise is labeled NOISE.
"""

from __future__ import annotations

from collections import deque

import numpy as np

NOISE = -1
_UNVISITED = -2


def dbscan(points, eps: float, min_pts: int) -> dict:
    """sha256 -> cluster id (0-based in discovery order) or NOISE."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_pts < 1:
        raise ValueError("min_pts must be at least 1")
    ordered = sorted(points, key=lambda p: p.sha256)
    if not ordered:
        return {}
    matrix = np.asarray([p.vector for p in ordered], dtype=np.float64)
    if not np.all(np.isfinite(matrix)):
        raise ValueError("points must be finite")
    n = len(ordered)
    # pairwise Euclidean distances; n stays desk-scale so the dense matrix is fine
    sq = np.sum(matrix ** 2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (matrix @ matrix.T)
    np.maximum(d2, 0.0, out=d2)
    within = d2 <= eps * eps + 1e-12
    neighbor_lists = [np.flatnonzero(within[i]) for i in range(n)]

    labels = np.full(n, _UNVISITED, dtype=np.int64)
    cluster_id = 0
    for seed in range(n):
        if labels[seed] != _UNVISITED:
            continue
        neighbors = neighbor_lists[seed]
        if len(neighbors) < min_pts:
            labels[seed] = NOISE
            continue
        labels[seed] = cluster_id
        queue = deque(int(i) for i in neighbors if i != seed)
        while queue:
            idx = queue.popleft()
            if labels[idx] == NOISE:
                labels[idx] = cluster_id          # border point
            if labels[idx] != _UNVISITED:
                continue
            labels[idx] = cluster_id
            expansion = neighbor_lists[idx]
            if len(expansion) >= min_pts:        # core point keeps expanding
                queue.extend(int(i) for i in expansion)
        cluster_id += 1
    return {p.sha256: int(labels[i]) for i, p in enumerate(ordered)}
