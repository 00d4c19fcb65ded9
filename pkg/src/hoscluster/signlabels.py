"""Sign labels naming hyperoctants, and Hamming-style distances between them.

A label packs one sign per coordinate into the bits of a Python int
(bit k set means coordinate k is non-negative), so the distance between
two labels is an XOR plus a popcount.  The matrix builder uses the
equivalent product form on +-1 sign matrices instead; both paths agree
exactly and the tests pin that.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidValueError
from .geometry import UnitPoint, UnitPointSet


@total_ordering
@dataclass(frozen=True)
class SignLabel:
    """Length-D sign pattern over {+, -} identifying one hyperoctant.

    Ordering compares the string form position by position, so '+' sorts
    before '-'; this is the tie-break order used everywhere downstream.
    """

    bits: int
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidValueError("label dimension must be >= 1")
        if not 0 <= self.bits < (1 << self.dim):
            raise InvalidValueError("label bits exceed the declared dimension")

    @classmethod
    def from_string(cls, text: str) -> "SignLabel":
        bits = 0
        for k, ch in enumerate(text):
            if ch == "+":
                bits |= 1 << k
            elif ch != "-":
                raise InvalidValueError(f"bad sign character {ch!r} (want '+' or '-')")
        return cls(bits, len(text))

    def to_string(self) -> str:
        cached = self.__dict__.get("_string_cache")
        if cached is None:
            bits = self._bit_array()
            cached = "".join("+" if b else "-" for b in bits)
            self.__dict__["_string_cache"] = cached
        return cached

    def _bit_array(self) -> np.ndarray:
        packed = np.frombuffer(
            self.bits.to_bytes((self.dim + 7) // 8, "little"), dtype=np.uint8
        )
        return np.unpackbits(packed, bitorder="little")[: self.dim]

    def sign_vector(self) -> np.ndarray:
        """The +-1 integer expansion of the label."""
        return np.where(self._bit_array() > 0, 1, -1).astype(np.int64)

    def __len__(self) -> int:
        return self.dim

    def __str__(self) -> str:
        return self.to_string()

    def __lt__(self, other: "SignLabel") -> bool:
        if self.dim != other.dim:
            raise DimensionMismatchError("cannot order labels of different dimensions")
        return self.to_string() < other.to_string()


def sign_label(v) -> SignLabel:
    """Label of the hyperoctant containing ``v``; zero coordinates count as '+'.

    Follows the sign-vector convention (>= 0 maps to +1) so the mapping is
    total and deterministic even on octant boundaries.
    """
    coords = v.coords if isinstance(v, UnitPoint) else np.asarray(v, dtype=np.float64)
    if coords.ndim != 1 or coords.size == 0:
        raise InvalidValueError("expected a 1-d vector")
    mask = coords >= 0.0
    packed = np.packbits(mask, bitorder="little")
    return SignLabel(int.from_bytes(packed.tobytes(), "little"), coords.size)


def sign_labels(points) -> list[SignLabel]:
    """Vectorized ``sign_label`` over the rows of a point set or matrix."""
    coords = points.coords if isinstance(points, UnitPointSet) else np.asarray(points)
    mask = coords >= 0.0
    dim = coords.shape[1]
    packed = np.packbits(mask, axis=1, bitorder="little")
    return [
        SignLabel(int.from_bytes(row.tobytes(), "little"), dim) for row in packed
    ]


def sign_matrix(items: Sequence) -> np.ndarray:
    """Rows of +-1 values, one per label (or per point, via its label)."""
    if isinstance(items, UnitPointSet):
        return np.where(items.coords >= 0.0, 1, -1).astype(np.int64)
    rows = []
    for item in items:
        if isinstance(item, SignLabel):
            rows.append(item.sign_vector())
        else:
            rows.append(sign_label(item).sign_vector())
    return np.vstack(rows)


def levenshtein(a: SignLabel, b: SignLabel) -> int:
    """Number of positions where two equal-length labels differ.

    On this two-letter alphabet the edit distance coincides with the
    Hamming distance, so it reduces to XOR + popcount.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"label lengths differ: {a.dim} vs {b.dim}")
    return (a.bits ^ b.bits).bit_count()


def levenshtein_matrix(labels: Sequence[SignLabel]) -> np.ndarray:
    """All pairwise label distances via the sign-matrix product form.

    With S the (n, D) matrix of +-1 sign rows, the distances are
    (D - S S^T) / 2.  The products are small integers, so the float
    matmul is exact and the result matches the pairwise popcount loop
    entry for entry.
    """
    labels = list(labels)
    if not labels:
        return np.zeros((0, 0), dtype=np.int64)
    dim = labels[0].dim
    if any(lbl.dim != dim for lbl in labels):
        raise DimensionMismatchError("all labels must share one dimension")
    signs = sign_matrix(labels).astype(np.float64)
    products = signs @ signs.T
    return ((dim - products) / 2.0).astype(np.int64)


def unique_labels(items: Iterable[SignLabel]) -> list[SignLabel]:
    """Deduplicate and sort labels ('+' before '-')."""
    return sorted(set(items))
