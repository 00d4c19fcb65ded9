"""Shared fixtures: reference datasets and a fast annealing config."""

import numpy as np
import pytest

from hoscluster import AnnealConfig, SignLabel, reference_dataset


@pytest.fixture(scope="session")
def reference_50():
    """The planted 5-groups-of-40 dataset in dimension 50, seed 42."""
    return reference_dataset(dim=50, seed=42)


@pytest.fixture(scope="session")
def reference_100():
    """Same construction in dimension 100."""
    return reference_dataset(dim=100, seed=42)


@pytest.fixture
def fast_anneal():
    """Cheap annealing config for contract tests that do not need quality."""
    return AnnealConfig(
        initial_temperature=0.05,
        cooling_factor=0.5,
        steps_per_temperature=25,
        min_temperature=0.01,
        restarts=1,
        seed=0,
    )


def random_unique_labels(rng: np.random.Generator, count: int, dim: int):
    """Sample distinct sign labels uniformly."""
    assert count <= 2 ** dim
    seen = set()
    while len(seen) < count:
        bits = 0
        for word in range(0, dim, 63):
            width = min(63, dim - word)
            bits |= int(rng.integers(0, 1 << width)) << word
        seen.add(bits)
    return [SignLabel(bits, dim) for bits in sorted(seen)]
