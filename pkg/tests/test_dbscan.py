"""DBSCAN baseline against an independent reachability-closure oracle."""

import math

import numpy as np
import pytest

from hoscluster import DbscanParams, UnitPointSet, normalize, run_dbscan, sweep_eps
from hoscluster.errors import InvalidParamsError
from hoscluster.geometry import pairwise_angular


def closure_oracle(points, params):
    """Clusters via transitive closure of the core-core neighbor relation.

    Core components come from union-find over core pairs within eps;
    cluster numbering follows the first core point in id order; a border
    point joins the earliest-numbered cluster among its core neighbors.
    Returns (set of frozensets, frozenset of noise ids).
    """
    n = len(points)
    dist = pairwise_angular(points.coords)
    within = dist <= params.eps
    core = within.sum(axis=1) >= params.min_pts

    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    core_rows = np.flatnonzero(core)
    for a in core_rows:
        for b in core_rows:
            if a < b and within[a, b]:
                union(int(a), int(b))

    # number core components by their first core point in id order
    ids = points.ids
    component_number = {}
    for row in sorted(core_rows, key=lambda r: ids[r]):
        root = find(int(row))
        if root not in component_number:
            component_number[root] = len(component_number)

    clusters = {num: set() for num in component_number.values()}
    noise = set()
    for row in range(n):
        if core[row]:
            clusters[component_number[find(row)]].add(int(ids[row]))
            continue
        core_neighbors = [r for r in np.flatnonzero(within[row]) if core[r]]
        if core_neighbors:
            target = min(component_number[find(int(r))] for r in core_neighbors)
            clusters[target].add(int(ids[row]))
        else:
            noise.add(int(ids[row]))
    return {frozenset(c) for c in clusters.values()}, frozenset(noise)


class TestDbscanParams:
    def test_eps_range(self):
        with pytest.raises(InvalidParamsError):
            DbscanParams(eps=0.0, min_pts=2)
        with pytest.raises(InvalidParamsError):
            DbscanParams(eps=3.5, min_pts=2)

    def test_min_pts_positive(self):
        with pytest.raises(InvalidParamsError):
            DbscanParams(eps=0.5, min_pts=0)


class TestRunDbscan:
    def test_coincident_points_form_one_cluster(self):
        coords = np.tile(normalize([1.0, 2.0, 3.0]), (5, 1))
        ps = UnitPointSet(coords, np.arange(5))
        result = run_dbscan(ps, DbscanParams(eps=0.1, min_pts=2))
        assert result.cluster_count == 1
        assert result.clusters[0] == (0, 1, 2, 3, 4)
        assert result.noise == ()

    def test_isolated_point_is_noise(self):
        rng = np.random.default_rng(1)
        blob = normalize([1.0, 0.0, 0.0]) + 0.05 * rng.standard_normal((30, 3))
        far = -normalize([1.0, 0.0, 0.0])
        ps = UnitPointSet.from_raw(np.vstack([blob, far.reshape(1, -1)]))
        result = run_dbscan(ps, DbscanParams(eps=0.3, min_pts=3))
        assert 30 in result.noise

    def test_matches_closure_oracle_on_random_instances(self):
        rng = np.random.default_rng(10)
        for trial in range(20):
            n = int(rng.integers(10, 200))
            dim = int(rng.integers(2, 8))
            coords = rng.standard_normal((n, dim))
            coords /= np.linalg.norm(coords, axis=1, keepdims=True)
            ps = UnitPointSet(coords, np.arange(n))
            params = DbscanParams(
                eps=float(rng.uniform(0.05, 1.2)), min_pts=int(rng.integers(2, 8))
            )
            result = run_dbscan(ps, params)
            got = ({frozenset(c) for c in result.clusters}, frozenset(result.noise))
            assert got == closure_oracle(ps, params), f"trial {trial}"

    def test_matches_oracle_with_permuted_ids(self):
        rng = np.random.default_rng(11)
        coords = rng.standard_normal((60, 3))
        coords /= np.linalg.norm(coords, axis=1, keepdims=True)
        ps = UnitPointSet(coords, rng.permutation(60))
        params = DbscanParams(eps=0.4, min_pts=4)
        result = run_dbscan(ps, params)
        got = ({frozenset(c) for c in result.clusters}, frozenset(result.noise))
        assert got == closure_oracle(ps, params)

    def test_partition_invariants(self, reference_50):
        points, _ = reference_50
        result = run_dbscan(points, DbscanParams(eps=0.3, min_pts=3))
        seen = set(result.noise)
        for members in result.clusters:
            assert seen.isdisjoint(members)
            seen.update(members)
        assert seen == set(range(len(points)))

    def test_recovers_planted_groups(self, reference_50):
        points, labels = reference_50
        result = run_dbscan(points, DbscanParams(eps=0.3, min_pts=3))
        assert result.cluster_count == 5
        got = {frozenset(c) for c in result.clusters}
        expected = {
            frozenset(np.flatnonzero(labels == g).tolist()) for g in range(5)
        }
        assert got == expected

    def test_eps_pi_single_cluster(self, reference_50):
        points, _ = reference_50
        result = run_dbscan(points, DbscanParams(eps=math.pi, min_pts=5))
        assert result.cluster_count == 1
        assert result.noise == ()


class TestSweepEps:
    def test_tiny_eps_all_noise(self, reference_50):
        points, _ = reference_50
        rows = sweep_eps(points, DbscanParams(eps=0.5, min_pts=3), [1e-6, 0.3])
        assert rows[0][1] == 0
        assert rows[0][2] == len(points)

    def test_full_eps_one_cluster(self, reference_50):
        points, _ = reference_50
        rows = sweep_eps(points, DbscanParams(eps=0.5, min_pts=3), [0.3, math.pi])
        assert rows[-1][1] == 1
        assert rows[-1][2] == 0

    def test_narrow_nontrivial_band(self, reference_50):
        # non-trivial cluster counts (> 1 cluster) confined to a band between
        # the all-noise and single-cluster regimes
        points, _ = reference_50
        grid = [0.01, 0.05, 0.3, 1.0, 1.9, 2.8, math.pi]
        rows = sweep_eps(points, DbscanParams(eps=0.5, min_pts=3), grid)
        counts = [r[1] for r in rows]
        assert counts[0] == 0
        assert counts[-1] == 1
        assert max(counts) == 5

    def test_grid_validation(self, reference_50):
        points, _ = reference_50
        base = DbscanParams(eps=0.5, min_pts=3)
        with pytest.raises(InvalidParamsError):
            sweep_eps(points, base, [0.5, 0.4])
        with pytest.raises(InvalidParamsError):
            sweep_eps(points, base, [])
        with pytest.raises(InvalidParamsError):
            sweep_eps(points, base, [0.5, 4.0])
