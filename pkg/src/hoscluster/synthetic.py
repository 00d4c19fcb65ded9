"""Seeded synthetic datasets for tests, demos and the reference runs.

The planted generator drops isotropic Gaussian bumps onto the sphere,
centered at hyperoctant middle points chosen so the groups sit pairwise
more than a quarter turn apart (up to six groups).  With the default
noise scale each bump stays strictly inside its hyperoctant.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParamsError
from .geometry import UnitPointSet, normalize


def separated_sign_vectors(n_groups: int, dim: int) -> np.ndarray:
    """(n_groups, dim) matrix of +-1 rows with pairwise-negative dot products.

    Rows come from the two-subset pattern code: one base column per
    unordered pair of groups, +1 exactly on that pair's rows, tiled
    cyclically to the requested dimension.  For up to 6 groups any two
    rows disagree on more than half the coordinates, so the octant
    middle points they define are more than pi/2 apart.
    """
    if n_groups < 1:
        raise InvalidParamsError("need at least one group")
    if n_groups == 1:
        return np.ones((1, dim), dtype=np.int64)
    if n_groups == 2:
        return np.vstack([np.ones(dim, dtype=np.int64), -np.ones(dim, dtype=np.int64)])
    if n_groups > 6:
        raise InvalidParamsError(
            "the pattern code guarantees > pi/2 separation only up to 6 groups"
        )
    base_cols = []
    for a in range(n_groups):
        for b in range(a + 1, n_groups):
            col = -np.ones(n_groups, dtype=np.int64)
            col[a] = 1
            col[b] = 1
            base_cols.append(col)
    base = np.column_stack(base_cols)  # (n_groups, C(n_groups, 2))
    reps = -(-dim // base.shape[1])  # ceil division
    return np.tile(base, reps)[:, :dim]


def planted_dataset(
    n_groups: int = 5,
    group_size: int = 40,
    dim: int = 50,
    noise_scale: float = 0.012,
    seed: int = 42,
) -> tuple[UnitPointSet, np.ndarray]:
    """Well-separated spherical bumps with known group memberships.

    Each group center is a hyperoctant middle point sigma/sqrt(dim); each
    point is normalize(center + noise_scale * gaussian).  Returns the
    point set (ids in row order, group-major) and the group index of each
    point.
    """
    if group_size < 1 or dim < 1:
        raise InvalidParamsError("group_size and dim must be positive")
    signs = separated_sign_vectors(n_groups, dim)
    centers = signs.astype(np.float64) / np.sqrt(dim)
    rng = np.random.default_rng(seed)
    rows = []
    labels = []
    for g in range(n_groups):
        for _ in range(group_size):
            raw = centers[g] + noise_scale * rng.standard_normal(dim)
            rows.append(normalize(raw))
            labels.append(g)
    points = UnitPointSet(np.vstack(rows), np.arange(len(rows), dtype=np.int64))
    return points, np.asarray(labels, dtype=np.int64)


def reference_dataset(dim: int = 50, seed: int = 42) -> tuple[UnitPointSet, np.ndarray]:
    """The fixed 5-groups-of-40 dataset the documentation and tests refer to."""
    return planted_dataset(n_groups=5, group_size=40, dim=dim, seed=seed)
