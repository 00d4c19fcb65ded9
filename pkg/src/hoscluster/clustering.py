"""The hyperoctant density-walk clustering pipeline.

Points sharing a hyperoctant are treated as one entity throughout: the
walk groups occupied-octant labels, and each final cluster is the union
of the point sets of its labels.  Grouping traverses the thresholded
reduced graph breadth-first and greedily extends the current label group
while the represented points stay dense enough; a group never crosses a
connected-component boundary, since the edge threshold exists precisely
to keep far-apart octants from being chained together.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InternalInvariantError, InvalidParamsError
from .geometry import UnitPointSet, dot_to_angle
from .octant_graph import (
    ReducedGraph,
    bfs_components,
    build_reduced_graph,
    default_d0,
    threshold_graph,
)
from .rotation import AnnealConfig, centering_value, optimize_rotation
from .signlabels import SignLabel, sign_labels

CARDINALITY_MODES = ("labels", "points")


@dataclass(frozen=True)
class HosParams:
    """Hyperparameters of the density-walk clustering run.

    delta0 is the minimum linear density a growing cluster must keep;
    k0 (> 1) is the minimum number of points in an emitted cluster; d0
    is the edge-weight threshold for the reduced graph (None picks the
    smallest integer above the mean edge weight).  cardinality_mode
    chooses whether the density condition counts labels or points.
    """

    delta0: float = 4.0
    k0: int = 2
    d0: Optional[int] = None
    cardinality_mode: str = "labels"
    rotate: bool = True
    anneal: AnnealConfig = field(default_factory=AnnealConfig)

    def __post_init__(self):
        if not (isinstance(self.delta0, (int, float)) and self.delta0 > 0):
            raise InvalidParamsError("delta0 must be a positive number")
        if self.k0 <= 1:
            raise InvalidParamsError("k0 must be greater than 1")
        if self.d0 is not None and self.d0 < 1:
            raise InvalidParamsError("d0 must be >= 1 when given")
        if self.cardinality_mode not in CARDINALITY_MODES:
            raise InvalidParamsError(
                f"cardinality_mode must be one of {CARDINALITY_MODES}"
            )


@dataclass(frozen=True, eq=False)
class HyperoctantIndex:
    """Assignment of every point to its hyperoctant.

    ``by_label`` maps each occupied label to the ids of the points it
    holds; ``proto_labels`` is the subset of labels holding more than one
    point (the proto-clusters).  ``points`` is the indexed set itself.
    """

    points: UnitPointSet
    by_label: dict[SignLabel, tuple[int, ...]]
    rows_by_label: dict[SignLabel, np.ndarray]
    proto_labels: frozenset[SignLabel]

    @property
    def occupied_count(self) -> int:
        return len(self.by_label)


def assign_hyperoctants(points: UnitPointSet) -> HyperoctantIndex:
    """Group point ids by the sign label of their hyperoctant."""
    labels = sign_labels(points)
    rows_by_label: dict[SignLabel, list[int]] = {}
    for row, label in enumerate(labels):
        rows_by_label.setdefault(label, []).append(row)
    by_label = {}
    row_arrays = {}
    for label in sorted(rows_by_label):
        rows = np.asarray(rows_by_label[label], dtype=np.int64)
        row_arrays[label] = rows
        by_label[label] = tuple(int(i) for i in np.sort(points.ids[rows]))
    proto = frozenset(lbl for lbl, ids in by_label.items() if len(ids) > 1)
    return HyperoctantIndex(points, by_label, row_arrays, proto)


def max_resolution(index: HyperoctantIndex, k0: int) -> int:
    """Number of proto-clusters holding at least k0 points.

    This is the cluster count the walk converges to as delta0 grows
    without bound.
    """
    return sum(
        1 for lbl in index.proto_labels if len(index.by_label[lbl]) >= k0
    )


class _GroupState:
    """Incremental diameter of the points represented by a label group.

    Tracks the minimum pairwise dot product; the diameter is its arccos.
    """

    def __init__(self, points: UnitPointSet, rows: np.ndarray):
        self.coords = points.coords
        self.rows = list(int(r) for r in rows)
        self.min_dot = self._internal_min_dot(rows)

    def _internal_min_dot(self, rows) -> float:
        block = self.coords[rows]
        if block.shape[0] == 1:
            return 1.0
        gram = block @ block.T
        np.fill_diagonal(gram, 1.0)
        return float(gram.min())

    def peek_min_dot(self, new_rows: np.ndarray) -> float:
        """Min dot if the octant rows ``new_rows`` joined the group."""
        new_block = self.coords[new_rows]
        cross = new_block @ self.coords[self.rows].T
        candidate = min(float(cross.min()), self._internal_min_dot(new_rows))
        return min(self.min_dot, candidate)

    def commit(self, new_rows: np.ndarray, new_min_dot: float) -> None:
        self.rows.extend(int(r) for r in new_rows)
        self.min_dot = new_min_dot

    @property
    def count(self) -> int:
        return len(self.rows)


def _diam_from_min_dot(min_dot: float) -> float:
    return dot_to_angle(min_dot)


def density_admits(
    current: Sequence[SignLabel],
    candidate: SignLabel,
    index: HyperoctantIndex,
    params: HosParams,
) -> bool:
    """Density condition for extending a label group by one octant.

    True when diam(points of current + candidate) * delta0 <= cardinality + 1,
    with cardinality the label count of ``current`` (labels mode) or the
    number of points it represents (points mode).  The multiplicative form
    avoids dividing by delta0.
    """
    rows = np.concatenate([index.rows_by_label[lbl] for lbl in current])
    state = _GroupState(index.points, rows)
    new_min = state.peek_min_dot(index.rows_by_label[candidate])
    diam = _diam_from_min_dot(new_min)
    if params.cardinality_mode == "labels":
        cardinality = len(current)
    else:
        cardinality = state.count
    return diam * params.delta0 <= cardinality + 1


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    """Final clusters, the noise set, and run provenance.

    ``clusters`` holds sorted point-id tuples ordered by smallest member
    id; ``label_groups`` aligns with ``clusters`` and keeps each group's
    labels in the order the walk accreted them (empty for methods that do
    not group octants).  Points in no cluster are noise.
    """

    clusters: tuple[tuple[int, ...], ...]
    noise: tuple[int, ...]
    label_groups: tuple[tuple[SignLabel, ...], ...]
    stats: dict

    @property
    def cluster_count(self) -> int:
        return len(self.clusters)

    def assignment_map(self) -> dict[int, int]:
        """point id -> cluster index, with -1 for noise."""
        mapping = {pid: -1 for pid in self.noise}
        for idx, members in enumerate(self.clusters):
            for pid in members:
                mapping[pid] = idx
        return mapping

    def validate(self, n_points: int, k0: Optional[int] = None) -> None:
        """Check disjointness, coverage and the cluster size floor."""
        seen: set[int] = set()
        total = 0
        for members in self.clusters:
            if k0 is not None and len(members) < k0:
                raise InternalInvariantError("cluster below the k0 size floor")
            total += len(members)
            seen.update(members)
        if total != len(seen):
            raise InternalInvariantError("clusters overlap")
        seen.update(self.noise)
        total += len(self.noise)
        if total != len(seen) or total != n_points:
            raise InternalInvariantError("clusters + noise do not cover all points")


def _finalize_result(
    groups: list[tuple[list[SignLabel], list[int]]],
    all_ids: Sequence[int],
    stats: dict,
) -> ClusteringResult:
    order = sorted(range(len(groups)), key=lambda g: min(groups[g][1]))
    clusters = tuple(tuple(sorted(groups[g][1])) for g in order)
    label_groups = tuple(tuple(groups[g][0]) for g in order)
    clustered = {pid for members in clusters for pid in members}
    noise = tuple(sorted(pid for pid in all_ids if pid not in clustered))
    return ClusteringResult(clusters, noise, label_groups, stats)


def dimension_supports(n_points: int, dim: int) -> bool:
    """Whether there are more hyperoctants than points (dim > log2 N)."""
    return dim > math.log2(n_points) if n_points > 0 else True


def run_hos(points: UnitPointSet, params: Optional[HosParams] = None) -> ClusteringResult:
    """Full clustering pipeline: rotate, index octants, walk, filter.

    Steps: optionally rotate the set to maximize its centering value,
    assign points to hyperoctants, build the reduced graph over occupied
    labels and threshold it at d0, enumerate nodes breadth-first per
    component, grow label groups greedily under the density condition,
    keep groups whose point unions reach k0, then add every left-over
    proto-cluster as its own group and apply the same k0 filter.
    Deterministic for a fixed annealing seed.
    """
    params = params or HosParams()
    n = len(points)
    if not dimension_supports(n, points.dim):
        warnings.warn(
            f"dimension {points.dim} is at most log2 of the point count ({n}); "
            "some points must share a hyperoctant by pigeonhole alone",
            RuntimeWarning,
            stacklevel=2,
        )

    centering_before = centering_value(points)
    if params.rotate:
        _, working, rotation_report = optimize_rotation(points, params.anneal)
        centering_after = rotation_report.final_centering
    else:
        working = points
        rotation_report = None
        centering_after = centering_before

    index = assign_hyperoctants(working)
    base_graph = build_reduced_graph(list(index.by_label))
    d0_used = params.d0 if params.d0 is not None else default_d0(base_graph, permissive=True)
    graph = threshold_graph(base_graph, d0_used)

    walk_groups = _walk_groups(graph, index, params)

    # Walk groups pass the size floor first; proto-clusters not in any kept
    # group are then appended as their own singleton groups, and the same
    # size floor applies to them uniformly.
    dense_groups = [g for g in walk_groups if len(g[1]) >= params.k0]
    in_dense = {lbl for labels, _ in dense_groups for lbl in labels}
    leftovers = sorted(index.proto_labels - in_dense)
    enriched = dense_groups + [
        ([lbl], list(index.by_label[lbl])) for lbl in leftovers
    ]
    kept = [(labels, ids) for labels, ids in enriched if len(ids) >= params.k0]

    stats = {
        "method": "hos",
        "N_prime": n,
        "N_occupied": index.occupied_count,
        "proto_cluster_count": len(index.proto_labels),
        "max_resolution": max_resolution(index, params.k0),
        "centering_before": centering_before,
        "centering_after": centering_after,
        "d0_used": int(d0_used),
        "delta0": float(params.delta0),
        "k0": int(params.k0),
        "cardinality_mode": params.cardinality_mode,
        "rotated": bool(params.rotate),
    }
    if rotation_report is not None:
        stats["rotation"] = rotation_report.as_dict()

    result = _finalize_result(kept, [int(i) for i in points.ids], stats)
    stats["cluster_count"] = result.cluster_count
    stats["noise_count"] = len(result.noise)
    result.validate(n, params.k0)
    _check_octant_atomicity(result, index)
    return result


def _walk_groups(
    graph: ReducedGraph, index: HyperoctantIndex, params: HosParams
) -> list[tuple[list[SignLabel], list[int]]]:
    """Greedy consecutive grouping along the per-component BFS orders.

    Each BFS node is consumed exactly once: when the next node fails the
    density condition the current group closes and the rejected node seeds
    the next group.
    """
    groups: list[tuple[list[SignLabel], list[int]]] = []
    for component in bfs_components(graph):
        j = 0
        while j < len(component):
            seed = component[j]
            labels = [seed]
            state = _GroupState(index.points, index.rows_by_label[seed])
            while j + 1 < len(component):
                candidate = component[j + 1]
                cand_rows = index.rows_by_label[candidate]
                new_min = state.peek_min_dot(cand_rows)
                diam = _diam_from_min_dot(new_min)
                if params.cardinality_mode == "labels":
                    cardinality = len(labels)
                else:
                    cardinality = state.count
                if diam * params.delta0 <= cardinality + 1:
                    labels.append(candidate)
                    state.commit(cand_rows, new_min)
                    j += 1
                else:
                    break
            ids = [pid for lbl in labels for pid in index.by_label[lbl]]
            groups.append((labels, ids))
            j += 1
    return groups


def _check_octant_atomicity(result: ClusteringResult, index: HyperoctantIndex) -> None:
    assignment = result.assignment_map()
    for label, ids in index.by_label.items():
        targets = {assignment[pid] for pid in ids}
        if len(targets) > 1:
            raise InternalInvariantError(
                f"points of octant {label} were split across clusters"
            )


def sweep_delta0(
    points: UnitPointSet,
    params: HosParams,
    grid: Sequence[float],
) -> list[tuple[float, int, int]]:
    """Run the pipeline once per delta0 value; rotation is shared.

    The rotation is optimized a single time on the input (when enabled)
    and reused for every grid value, so the sweep isolates the effect of
    delta0.  Returns (delta0, cluster count, noise count) per grid value.
    """
    grid = [float(v) for v in grid]
    if not grid:
        raise InvalidParamsError("delta0 grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParamsError("delta0 grid must be strictly ascending")
    if params.rotate:
        _, working, _ = optimize_rotation(points, params.anneal)
    else:
        working = points
    rows = []
    for value in grid:
        run_params = HosParams(
            delta0=value,
            k0=params.k0,
            d0=params.d0,
            cardinality_mode=params.cardinality_mode,
            rotate=False,
            anneal=params.anneal,
        )
        result = run_hos(working, run_params)
        rows.append((value, result.cluster_count, len(result.noise)))
    return rows
