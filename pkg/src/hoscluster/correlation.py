"""Sampling pairwise distances to compare the three metrics on a dataset."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import InvalidParamsError
from .geometry import UnitPointSet, angular_distance, euclidean_distance
from .signlabels import levenshtein, sign_labels


def sample_distance_triples(
    points: UnitPointSet, n_pairs: int, seed: int = 0
) -> list[tuple[float, float, float]]:
    """(angular, euclidean, label distance) for seeded random point pairs.

    Pairs are drawn without replacement; asking for at least as many pairs
    as exist returns every pair exactly once.
    """
    if n_pairs < 2:
        raise InvalidParamsError("need at least 2 pairs to correlate anything")
    n = len(points)
    total = n * (n - 1) // 2
    rng = np.random.default_rng(seed)
    if n_pairs >= total:
        chosen = np.arange(total)
    else:
        chosen = rng.choice(total, size=n_pairs, replace=False)
        chosen.sort()
    labels = sign_labels(points)
    triples = []
    for flat in chosen:
        i, j = _unrank_pair(int(flat), n)
        triples.append(
            (
                angular_distance(points.coords[i], points.coords[j]),
                euclidean_distance(points.coords[i], points.coords[j]),
                float(levenshtein(labels[i], labels[j])),
            )
        )
    return triples


def _unrank_pair(flat: int, n: int) -> tuple[int, int]:
    """Map a flat index in [0, C(n,2)) to the pair (i, j), i < j."""
    i = int((2 * n - 1 - math.sqrt((2 * n - 1) ** 2 - 8 * flat)) // 2)
    # Guard against sqrt rounding at row boundaries.
    while _row_start(i + 1, n) <= flat:
        i += 1
    while _row_start(i, n) > flat:
        i -= 1
    j = i + 1 + (flat - _row_start(i, n))
    return i, j


def _row_start(i: int, n: int) -> int:
    return i * n - i * (i + 1) // 2


def pearson(x, y) -> float:
    """Pearson correlation; NaN (with a warning) when either side is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.std() == 0.0 or y.std() == 0.0:
        warnings.warn(
            "correlation undefined: one of the distance samples is constant",
            RuntimeWarning,
            stacklevel=2,
        )
        return float("nan")
    return float(np.corrcoef(x, y)[0, 1])
