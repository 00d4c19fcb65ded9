"""Disjoint-pair rotations and the annealing search that centers a data set.

The centering value of a point set is the mean cosine similarity between
each point and the middle point of its hyperoctant; it equals the mean of
sum_j |v_j| / sqrt(D) and lives in (0, 1].  A rotation built from disjoint
coordinate pairs is cheap to evaluate incrementally: changing one pair's
angle only touches two coordinates, so each annealing move costs O(N).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    EmptySetError,
    IndexOutOfRangeError,
    InvalidValueError,
    OverlappingPairsError,
)
from .geometry import UnitPointSet
from .signlabels import sign_labels

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def centering_value(points) -> float:
    """Mean similarity of each point to its hyperoctant middle point.

    Clamped to at most 1.0; floating-point summation can otherwise creep
    a hair above the mathematical maximum.
    """
    coords = points.coords if isinstance(points, UnitPointSet) else np.asarray(points)
    if coords.ndim == 1:
        coords = coords.reshape(1, -1)
    if coords.shape[0] == 0:
        raise EmptySetError("centering value of an empty set is undefined")
    dim = coords.shape[1]
    value = float(np.abs(coords).sum(axis=1).mean() / math.sqrt(dim))
    return min(1.0, value)


@dataclass(frozen=True)
class RotationPlan:
    """Disjoint coordinate pairs with one rotation angle per pair.

    Pairs are 0-based (i, j) with i < j and no index reused across pairs;
    angles are stored normalized to [0, 2*pi).
    """

    pairs: tuple[tuple[int, int], ...] = ()
    angles: tuple[float, ...] = ()

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        angles = tuple(float(a) % TWO_PI for a in self.angles)
        if len(pairs) != len(angles):
            raise InvalidValueError("need exactly one angle per coordinate pair")
        used = set()
        for i, j in pairs:
            if i >= j:
                raise InvalidValueError(f"pair ({i}, {j}) must satisfy i < j")
            if i < 0:
                raise IndexOutOfRangeError(f"negative coordinate index {i}")
            if i in used or j in used:
                raise OverlappingPairsError("pairs must use disjoint coordinates")
            used.update((i, j))
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "angles", angles)

    def validate_for(self, dim: int) -> None:
        for i, j in self.pairs:
            if j >= dim:
                raise IndexOutOfRangeError(
                    f"pair ({i}, {j}) does not fit in dimension {dim}"
                )

    def to_json_dict(self, dim: int) -> dict:
        self.validate_for(dim)
        return {
            "format_version": 1,
            "dim": int(dim),
            "pairs": [[i, j] for i, j in self.pairs],
            "angles": list(self.angles),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> tuple["RotationPlan", int]:
        try:
            dim = int(doc["dim"])
            plan = cls(
                tuple((int(i), int(j)) for i, j in doc["pairs"]),
                tuple(float(a) for a in doc["angles"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidValueError(f"malformed rotation plan document: {exc}")
        plan.validate_for(dim)
        return plan, dim


def build_rotation(plan: RotationPlan, dim: int) -> np.ndarray:
    """The dim x dim orthogonal matrix realizing the plan.

    Identity everywhere except, per pair (i, j) with angle t:
    (i,i) = (j,j) = cos t, (i,j) = -sin t, (j,i) = sin t.
    """
    plan.validate_for(dim)
    matrix = np.eye(dim)
    for (i, j), theta in zip(plan.pairs, plan.angles):
        c, s = math.cos(theta), math.sin(theta)
        matrix[i, i] = c
        matrix[j, j] = c
        matrix[i, j] = -s
        matrix[j, i] = s
    return matrix


def apply_rotation(plan: RotationPlan, points: UnitPointSet) -> UnitPointSet:
    """Rotate every point; ids and pairwise angular distances are preserved.

    Only the paired coordinate columns are touched, which matches the full
    matrix product (all other matrix entries multiply exact zeros).
    """
    plan.validate_for(points.dim)
    coords = points.coords.copy()
    for (i, j), theta in zip(plan.pairs, plan.angles):
        c, s = math.cos(theta), math.sin(theta)
        xi = coords[:, i].copy()
        xj = coords[:, j].copy()
        coords[:, i] = c * xi - s * xj
        coords[:, j] = s * xi + c * xj
    return UnitPointSet(coords, points.ids)


@dataclass(frozen=True)
class AnnealConfig:
    """Knobs for the simulated-annealing rotation search."""

    initial_temperature: float = 0.05
    cooling_factor: float = 0.95
    steps_per_temperature: int = 200
    min_temperature: float = 1e-4
    angle_step_stddev: float = 0.3
    restarts: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.initial_temperature <= 0 or self.min_temperature <= 0:
            raise InvalidValueError("temperatures must be positive")
        if not 0 < self.cooling_factor < 1:
            raise InvalidValueError("cooling factor must lie in (0, 1)")
        if self.steps_per_temperature < 1 or self.restarts < 1:
            raise InvalidValueError("step and restart counts must be positive")
        if self.angle_step_stddev <= 0:
            raise InvalidValueError("angle step stddev must be positive")


@dataclass(frozen=True)
class RotationReport:
    """What the rotation search achieved, for run provenance."""

    initial_centering: float
    final_centering: float
    initial_occupied: int
    final_occupied: int
    accepted_moves: int
    best_restart: int

    def as_dict(self) -> dict:
        return {
            "initial_centering": self.initial_centering,
            "final_centering": self.final_centering,
            "initial_occupied": self.initial_occupied,
            "final_occupied": self.final_occupied,
            "accepted_moves": self.accepted_moves,
            "best_restart": self.best_restart,
        }


@dataclass
class _SearchState:
    """Mutable per-restart annealing state with an incremental objective."""

    pairs: list[list[int]]
    angles: list[float]
    pair_sums: list[float]
    unused: set[int]
    total: float = 0.0
    col_abs: np.ndarray = field(default=None, repr=False)
    columns: np.ndarray = field(default=None, repr=False)

    def pair_abs_sum(self, i: int, j: int, theta: float) -> float:
        c, s = math.cos(theta), math.sin(theta)
        yi = c * self.columns[i] - s * self.columns[j]
        yj = s * self.columns[i] + c * self.columns[j]
        return float(np.abs(yi).sum() + np.abs(yj).sum())

    def exact_total(self) -> float:
        fixed = float(sum(self.col_abs[c] for c in self.unused))
        return fixed + sum(
            self.pair_abs_sum(i, j, t)
            for (i, j), t in zip(self.pairs, self.angles)
        )

    def snapshot(self) -> tuple[tuple[tuple[int, int], ...], tuple[float, ...]]:
        return (
            tuple((i, j) for i, j in self.pairs),
            tuple(a % TWO_PI for a in self.angles),
        )


def _initial_state(columns: np.ndarray, col_abs: np.ndarray, dim: int) -> _SearchState:
    pairs = [[2 * k, 2 * k + 1] for k in range(dim // 2)]
    state = _SearchState(
        pairs=pairs,
        angles=[0.0] * len(pairs),
        pair_sums=[],
        unused=set(range(2 * (dim // 2), dim)),
        col_abs=col_abs,
        columns=columns,
    )
    state.pair_sums = [float(col_abs[i] + col_abs[j]) for i, j in pairs]
    state.total = state.exact_total()
    return state


def optimize_rotation(
    points: UnitPointSet, config: Optional[AnnealConfig] = None
) -> tuple[RotationPlan, UnitPointSet, RotationReport]:
    """Search for a plan maximizing the centering value of the rotated set.

    Runs ``config.restarts`` independent annealing chains (restart r seeds
    its generator with seed + r) and keeps the best state ever visited,
    starting from the identity plan, so the returned centering value never
    falls below the input's.  Ties between restarts go to the lower index.
    """
    config = config or AnnealConfig()
    coords = points.coords
    n, dim = coords.shape
    denom = n * math.sqrt(dim)
    columns = np.ascontiguousarray(coords.T)
    col_abs = np.abs(coords).sum(axis=0)

    initial_value = centering_value(points)
    best_exact_total = float(np.abs(coords).sum())
    best_plan = RotationPlan()
    best_restart = -1
    accepted_total = 0

    for restart in range(config.restarts):
        rng = np.random.default_rng(config.seed + restart)
        state = _initial_state(columns, col_abs, dim)
        temperature = config.initial_temperature
        while temperature > config.min_temperature:
            for _ in range(config.steps_per_temperature):
                accepted = _anneal_step(state, rng, temperature, config, denom)
                if accepted:
                    accepted_total += 1
                    if state.total > best_exact_total:
                        # Confirm candidate bests exactly; the running total
                        # accumulates rounding drift across thousands of moves.
                        exact = state.exact_total()
                        if exact > best_exact_total:
                            best_exact_total = exact
                            best_plan = RotationPlan(*state.snapshot())
                            best_restart = restart
            state.total = state.exact_total()
            temperature *= config.cooling_factor

    rotated = apply_rotation(best_plan, points)
    final_value = centering_value(rotated)
    report = RotationReport(
        initial_centering=initial_value,
        final_centering=final_value,
        initial_occupied=len(set(sign_labels(points))),
        final_occupied=len(set(sign_labels(rotated))),
        accepted_moves=accepted_total,
        best_restart=best_restart,
    )
    logger.debug(
        "rotation search: centering %.6f -> %.6f, occupied %d -> %d",
        report.initial_centering,
        report.final_centering,
        report.initial_occupied,
        report.final_occupied,
    )
    return best_plan, rotated, report


def _anneal_step(
    state: _SearchState,
    rng: np.random.Generator,
    temperature: float,
    config: AnnealConfig,
    denom: float,
) -> bool:
    """Propose one move, apply Metropolis acceptance; True if accepted.

    Move mix: 0.70 perturb one angle, 0.15 resample one pair endpoint from
    the unused coordinates, 0.15 toggle (add or remove) a pair.  Moves that
    are impossible in the current state fall back to an angle perturbation.
    """
    roll = rng.random()
    k = len(state.pairs)
    if roll < 0.70 or (roll < 0.85 and not state.unused) or k == 0:
        if k == 0:
            return _try_add_pair(state, rng, temperature, denom, config=config)
        idx = int(rng.integers(k))
        theta = (state.angles[idx] + rng.normal(0.0, config.angle_step_stddev)) % TWO_PI
        i, j = state.pairs[idx]
        new_sum = state.pair_abs_sum(i, j, theta)
        delta = new_sum - state.pair_sums[idx]
        if _metropolis(delta / denom, temperature, rng):
            state.angles[idx] = theta
            state.pair_sums[idx] = new_sum
            state.total += delta
            return True
        return False

    if roll < 0.85:
        idx = int(rng.integers(k))
        i, j = state.pairs[idx]
        drop = i if rng.random() < 0.5 else j
        keep = j if drop == i else i
        candidates = sorted(state.unused)
        new_partner = int(candidates[int(rng.integers(len(candidates)))])
        a, b = min(keep, new_partner), max(keep, new_partner)
        theta = state.angles[idx]
        new_sum = state.pair_abs_sum(a, b, theta)
        delta = new_sum - state.pair_sums[idx] + state.col_abs[drop] - state.col_abs[new_partner]
        if _metropolis(delta / denom, temperature, rng):
            state.pairs[idx] = [a, b]
            state.pair_sums[idx] = new_sum
            state.unused.discard(new_partner)
            state.unused.add(drop)
            state.total += delta
            return True
        return False

    remove = rng.random() < 0.5
    if remove and k > 0:
        idx = int(rng.integers(k))
        i, j = state.pairs[idx]
        delta = state.col_abs[i] + state.col_abs[j] - state.pair_sums[idx]
        if _metropolis(delta / denom, temperature, rng):
            state.pairs.pop(idx)
            state.angles.pop(idx)
            state.pair_sums.pop(idx)
            state.unused.update((i, j))
            state.total += delta
            return True
        return False
    return _try_add_pair(state, rng, temperature, denom, config=config)


def _try_add_pair(state, rng, temperature, denom, config: Optional[AnnealConfig] = None):
    if len(state.unused) < 2:
        return False
    candidates = sorted(state.unused)
    picked = rng.choice(len(candidates), size=2, replace=False)
    a, b = sorted(int(candidates[p]) for p in picked)
    stddev = config.angle_step_stddev if config else 0.3
    theta = rng.normal(0.0, stddev) % TWO_PI
    new_sum = state.pair_abs_sum(a, b, theta)
    delta = new_sum - state.col_abs[a] - state.col_abs[b]
    if _metropolis(delta / denom, temperature, rng):
        state.pairs.append([a, b])
        state.angles.append(theta)
        state.pair_sums.append(new_sum)
        state.unused.difference_update((a, b))
        state.total += delta
        return True
    return False


def _metropolis(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    if delta >= 0:
        return True
    return rng.random() < math.exp(delta / temperature)
