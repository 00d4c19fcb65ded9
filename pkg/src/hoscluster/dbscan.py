"""DBSCAN under the angular metric, as a comparison baseline.

Classic core/border/noise semantics with brute-force neighborhoods
(exact, adequate at desk scale).  Points are scanned in id order, which
makes border assignment deterministic: a border point near several core
points joins the earliest-created cluster that reaches it.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .clustering import ClusteringResult, _finalize_result
from .errors import InvalidParamsError
from .geometry import UnitPointSet


@dataclass(frozen=True)
class DbscanParams:
    """Neighborhood radius (radians) and core-point threshold.

    The eps-neighborhood of a point includes the point itself, so a point
    is core when at least min_pts points (itself counted) lie within eps.
    """

    eps: float
    min_pts: int

    def __post_init__(self):
        if not 0 < self.eps <= math.pi:
            raise InvalidParamsError("eps must lie in (0, pi]")
        if self.min_pts < 1:
            raise InvalidParamsError("min_pts must be >= 1")


def run_dbscan(points: UnitPointSet, params: DbscanParams) -> ClusteringResult:
    """Cluster with density-reachability under the angular distance."""
    n = len(points)
    order = np.argsort(points.ids)  # rows visited in ascending point id
    coords = points.coords

    gram = np.clip(coords @ coords.T, -1.0, 1.0)
    np.fill_diagonal(gram, 1.0)
    within = np.arccos(gram) <= params.eps
    neighbor_rows = [np.flatnonzero(within[row]) for row in range(n)]
    is_core = np.array([len(nb) >= params.min_pts for nb in neighbor_rows])

    UNSEEN, NOISE = -2, -1
    labels = np.full(n, UNSEEN, dtype=np.int64)
    cluster_id = 0
    for row in order:
        if labels[row] != UNSEEN:
            continue
        if not is_core[row]:
            labels[row] = NOISE
            continue
        labels[row] = cluster_id
        queue = deque(int(r) for r in neighbor_rows[row])
        while queue:
            nbr = queue.popleft()
            if labels[nbr] == NOISE:
                labels[nbr] = cluster_id  # border point, previously unreachable
            if labels[nbr] != UNSEEN:
                continue
            labels[nbr] = cluster_id
            if is_core[nbr]:
                queue.extend(int(r) for r in neighbor_rows[nbr])
        cluster_id += 1

    groups: list[tuple[list, list[int]]] = []
    for cid in range(cluster_id):
        member_ids = [int(points.ids[r]) for r in np.flatnonzero(labels == cid)]
        groups.append(([], member_ids))

    stats = {
        "method": "dbscan",
        "N_prime": n,
        "eps": float(params.eps),
        "min_pts": int(params.min_pts),
    }
    result = _finalize_result(groups, [int(i) for i in points.ids], stats)
    stats["cluster_count"] = result.cluster_count
    stats["noise_count"] = len(result.noise)
    result.validate(n)
    return result


def sweep_eps(
    points: UnitPointSet,
    params: DbscanParams,
    grid: Sequence[float],
) -> list[tuple[float, int, int]]:
    """One run per eps value; returns (eps, cluster count, noise count)."""
    grid = [float(v) for v in grid]
    if not grid:
        raise InvalidParamsError("eps grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParamsError("eps grid must be strictly ascending")
    if grid[0] <= 0 or grid[-1] > math.pi:
        raise InvalidParamsError("eps values must lie in (0, pi]")
    rows = []
    for value in grid:
        result = run_dbscan(points, DbscanParams(eps=value, min_pts=params.min_pts))
        rows.append((value, result.cluster_count, len(result.noise)))
    return rows
