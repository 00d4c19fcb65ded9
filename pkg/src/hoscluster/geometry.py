"""Metric primitives for finite point sets on the unit sphere.

Distances are measured with the angular metric d(u, v) = arccos(u . v)
for unit vectors, so every distance lives in [0, pi].  The linear density
of a set is its cardinality divided by its diameter, a volume-free density
surrogate that stays well-scaled as the dimension grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptySetError,
    InvalidValueError,
    ZeroVectorError,
)

ZERO_NORM_THRESHOLD = 1e-12
UNIT_NORM_TOLERANCE = 1e-9


def normalize(raw) -> np.ndarray:
    """Scale a vector to unit Euclidean norm.

    Raises:
        ZeroVectorError: norm below 1e-12 (the origin is excluded).
        InvalidValueError: NaN/Inf coordinates or a non-vector input.
    """
    coords = np.asarray(raw, dtype=np.float64)
    if coords.ndim != 1 or coords.size == 0:
        raise InvalidValueError(f"expected a 1-d vector, got shape {coords.shape}")
    if not np.all(np.isfinite(coords)):
        raise InvalidValueError("vector contains NaN or Inf coordinates")
    norm = float(np.linalg.norm(coords))
    if norm < ZERO_NORM_THRESHOLD:
        raise ZeroVectorError("cannot normalize a (near-)zero vector")
    return coords / norm


@dataclass(frozen=True, eq=False)
class UnitPoint:
    """A single point on the unit sphere with a stable integer id."""

    id: int
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 1 or coords.size == 0:
            raise InvalidValueError("UnitPoint coords must be a non-empty 1-d vector")
        if not np.all(np.isfinite(coords)):
            raise InvalidValueError("UnitPoint coords contain NaN or Inf")
        if abs(float(np.linalg.norm(coords)) - 1.0) > UNIT_NORM_TOLERANCE:
            raise InvalidValueError("UnitPoint coords are not unit-norm")
        object.__setattr__(self, "coords", coords)
        coords.setflags(write=False)

    @classmethod
    def from_raw(cls, point_id: int, raw) -> "UnitPoint":
        return cls(point_id, normalize(raw))

    @property
    def dim(self) -> int:
        return int(self.coords.shape[0])


@dataclass(frozen=True, eq=False)
class UnitPointSet:
    """N unit-norm points, row-major, with ids forming a permutation of 0..N-1."""

    coords: np.ndarray
    ids: np.ndarray

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        ids = np.asarray(self.ids, dtype=np.int64)
        if coords.ndim != 2 or coords.shape[1] < 1:
            raise InvalidValueError("coords must be a 2-d (N, D) array with D >= 1")
        if coords.shape[0] == 0:
            raise EmptySetError("a point set must hold at least one point")
        if not np.all(np.isfinite(coords)):
            raise InvalidValueError("coords contain NaN or Inf")
        norms = np.linalg.norm(coords, axis=1)
        if np.max(np.abs(norms - 1.0)) > UNIT_NORM_TOLERANCE:
            raise InvalidValueError("every row must have unit Euclidean norm")
        if ids.shape != (coords.shape[0],):
            raise InvalidValueError("ids must be one integer per row")
        if not np.array_equal(np.sort(ids), np.arange(coords.shape[0])):
            raise InvalidValueError("ids must be a permutation of 0..N-1")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "ids", ids)
        coords.setflags(write=False)
        ids.setflags(write=False)

    @classmethod
    def from_raw(cls, rows, ids=None) -> "UnitPointSet":
        """Normalize each row of ``rows`` and wrap the result."""
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2:
            raise InvalidValueError("expected a 2-d array of row vectors")
        if rows.shape[0] == 0:
            raise EmptySetError("a point set must hold at least one point")
        coords = np.vstack([normalize(row) for row in rows])
        if ids is None:
            ids = np.arange(rows.shape[0], dtype=np.int64)
        return cls(coords, ids)

    def __len__(self) -> int:
        return int(self.coords.shape[0])

    @property
    def dim(self) -> int:
        return int(self.coords.shape[1])

    @cached_property
    def row_of_id(self) -> np.ndarray:
        """Inverse permutation: row_of_id[point_id] = row index."""
        inv = np.empty(len(self), dtype=np.int64)
        inv[self.ids] = np.arange(len(self), dtype=np.int64)
        inv.setflags(write=False)
        return inv

    def point(self, row: int) -> UnitPoint:
        return UnitPoint(int(self.ids[row]), self.coords[row])


def _coords(v) -> np.ndarray:
    if isinstance(v, UnitPoint):
        return v.coords
    return np.asarray(v, dtype=np.float64)


def _matrix(points) -> np.ndarray:
    if isinstance(points, UnitPointSet):
        return points.coords
    m = np.asarray(points, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    return m


def angular_distance(u, v) -> float:
    """Angle in radians between two unit vectors, in [0, pi].

    Equals arccos of the (clamped) dot product, but is evaluated as
    2 * atan2(|u - v|, |u + v|): the arccos form amplifies one-ulp dot
    rounding into ~1e-8 near coincident or antipodal pairs, while this
    form is exact at both ends (identical inputs give exactly 0.0).
    """
    a, b = _coords(u), _coords(v)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimensions differ: {a.shape[0]} vs {b.shape[0]}")
    return float(2.0 * math.atan2(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def euclidean_distance(u, v) -> float:
    """Standard L2 distance between two vectors of equal dimension."""
    a, b = _coords(u), _coords(v)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimensions differ: {a.shape[0]} vs {b.shape[0]}")
    return float(np.linalg.norm(a - b))


def pairwise_angular(points) -> np.ndarray:
    """Symmetric matrix of angular distances with a zero diagonal."""
    m = _matrix(points)
    gram = np.clip(m @ m.T, -1.0, 1.0)
    np.fill_diagonal(gram, 1.0)
    return np.arccos(gram)


# Dot products this close to 1 are indistinguishable from coincidence at
# float precision (a few ulps of headroom past normalize() rounding).
_COINCIDENT_DOT = 1.0 - 8e-15


def dot_to_angle(dot: float) -> float:
    """arccos with clamping, snapping near-coincident dots to exactly 0."""
    if dot >= _COINCIDENT_DOT:
        return 0.0
    return float(np.arccos(max(-1.0, dot)))


def diameter(points) -> float:
    """Largest pairwise angular distance; 0.0 for a singleton.

    Bitwise-duplicate rows yield exactly 0.0, so the zero-diameter
    contracts downstream (infinite density) hold for coincident points.
    """
    m = _matrix(points)
    n = m.shape[0]
    if n == 0:
        raise EmptySetError("diameter of an empty set is undefined")
    if n == 1:
        return 0.0
    gram = m @ m.T
    np.fill_diagonal(gram, 1.0)
    return dot_to_angle(float(gram.min()))


def linear_density(points) -> float:
    """Cardinality divided by angular diameter.

    A set with zero diameter (singleton or coincident points) gets the
    +infinity sentinel so any minimum-density threshold passes vacuously.
    """
    m = _matrix(points)
    if m.shape[0] == 0:
        raise EmptySetError("density of an empty set is undefined")
    diam = diameter(m)
    if diam == 0.0:
        return math.inf
    return m.shape[0] / diam


def hyperoctant_area_fraction(dim: int) -> float:
    """Spherical surface area of one hyperoctant's cap on the unit sphere.

    The total surface area of the (dim-1)-sphere is 2*pi^(dim/2)/Gamma(dim/2)
    and the 2^dim hyperoctants split it evenly, so the fraction is that area
    divided by 2^dim.  Evaluated in log-gamma space to stay finite for large
    dimensions; it tends to 0 as the dimension grows.
    """
    if dim < 1:
        raise InvalidValueError("dimension must be >= 1")
    log_area = math.log(2.0) + 0.5 * dim * math.log(math.pi) - math.lgamma(0.5 * dim)
    return math.exp(log_area - dim * math.log(2.0))
