"""Reduced graphs over occupied hyperoctants and their deterministic traversal.

The full hypercube graph on all 2^D sign labels is never materialized.
Whether a label sits on a shortest hypercube path between two others is
decidable from label distances alone (the triangle equality), so the
reduced graph over the occupied labels is built from their distance
matrix in O(n^3) without touching the other 2^D - n labels.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    DuplicateLabelsError,
    EmptyGraphError,
    EmptySetError,
    InternalInvariantError,
    InvalidValueError,
    UnknownStartError,
)
from .signlabels import SignLabel, levenshtein, levenshtein_matrix


def on_geodesic(a: SignLabel, b: SignLabel, z: SignLabel) -> bool:
    """True when ``z`` lies on some shortest hypercube path from ``a`` to ``b``.

    Equivalent to z agreeing with a and b on every coordinate where a and b
    agree, i.e. d(a, z) + d(z, b) = d(a, b).  Endpoints themselves satisfy
    the condition; callers that care about interior labels exclude them.
    """
    if not (a.dim == b.dim == z.dim):
        raise DimensionMismatchError("labels must share one dimension")
    agree_mask = ~(a.bits ^ b.bits) & ((1 << a.dim) - 1)
    return (a.bits ^ z.bits) & agree_mask == 0


@dataclass(frozen=True)
class ReducedGraph:
    """Weighted graph on occupied hyperoctant labels.

    ``nodes`` is sorted ascending ('+' before '-'); ``edges`` holds
    (node index, node index, weight) triples with index pairs i < j and
    weight equal to the label distance of the endpoints.  ``d0`` records
    the threshold used to filter edges, or None for the unfiltered graph.
    """

    nodes: tuple[SignLabel, ...]
    edges: tuple[tuple[int, int, int], ...]
    d0: Optional[int] = None

    def __post_init__(self):
        if not self.nodes:
            raise EmptySetError("a graph needs at least one node")
        dim = self.nodes[0].dim
        for prev, cur in zip(self.nodes, self.nodes[1:]):
            if not prev < cur:
                raise InvalidValueError("nodes must be strictly sorted")
        seen = set()
        for i, j, w in self.edges:
            if i == j:
                raise InvalidValueError("self-loops are not allowed")
            if not (0 <= i < j < len(self.nodes)):
                raise InvalidValueError("edge endpoints out of range or unordered")
            if (i, j) in seen:
                raise InvalidValueError("duplicate edge")
            seen.add((i, j))
            if not 1 <= w <= dim or w != levenshtein(self.nodes[i], self.nodes[j]):
                raise InvalidValueError("edge weight must equal the label distance")

    @property
    def dim(self) -> int:
        return self.nodes[0].dim

    def node_index(self, label: SignLabel) -> int:
        try:
            return self._index_map[label]
        except KeyError:
            raise UnknownStartError(f"label {label} is not a node of this graph")

    @property
    def _index_map(self) -> dict[SignLabel, int]:
        cached = self.__dict__.get("_index_map_cache")
        if cached is None:
            cached = {lbl: i for i, lbl in enumerate(self.nodes)}
            self.__dict__["_index_map_cache"] = cached
        return cached

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Per node, its (weight, neighbor index) list sorted by (weight, label).

        Nodes are stored in ascending label order, so sorting by neighbor
        index sorts by label.
        """
        adj: list[list[tuple[int, int]]] = [[] for _ in self.nodes]
        for i, j, w in self.edges:
            adj[i].append((w, j))
            adj[j].append((w, i))
        for entries in adj:
            entries.sort()
        return adj

    def is_connected(self) -> bool:
        if len(self.nodes) == 1:
            return True
        adj = self.adjacency()
        seen = {0}
        queue = deque([0])
        while queue:
            cur = queue.popleft()
            for _, nbr in adj[cur]:
                if nbr not in seen:
                    seen.add(nbr)
                    queue.append(nbr)
        return len(seen) == len(self.nodes)


def build_reduced_graph(occupied: Sequence[SignLabel]) -> ReducedGraph:
    """Connect occupied labels that are hypercube neighbors or mutually visible.

    Two labels get an edge when their distance is 1, or when no third
    occupied label lies on any shortest hypercube path between them.
    That holds exactly when no third label z satisfies
    d(a, z) + d(z, b) = d(a, b), which is read off the distance matrix.
    The result is always connected; a traversal re-checks that before
    returning.
    """
    labels = list(occupied)
    if not labels:
        raise EmptySetError("cannot build a graph over zero labels")
    dim = labels[0].dim
    if any(lbl.dim != dim for lbl in labels):
        raise DimensionMismatchError("all labels must share one dimension")
    if len(set(labels)) != len(labels):
        raise DuplicateLabelsError("occupied labels must be unique")

    nodes = tuple(sorted(labels))
    n = len(nodes)
    if n == 1:
        return ReducedGraph(nodes, ())

    dist = levenshtein_matrix(nodes)
    big = np.int64(4 * dim + 4)
    edges = []
    for i in range(n - 1):
        # through[k, j] = dist[i, k] + dist[k, j]; exclude k == i and k == j.
        through = dist[i][:, None] + dist
        through[i, :] = big
        np.fill_diagonal(through, big)
        best = through.min(axis=0)
        for j in range(i + 1, n):
            if best[j] > dist[i, j]:
                edges.append((i, j, int(dist[i, j])))

    graph = ReducedGraph(nodes, tuple(edges))
    if not graph.is_connected():
        raise InternalInvariantError("reduced graph construction lost connectivity")
    return graph


def threshold_graph(graph: ReducedGraph, d0: int) -> ReducedGraph:
    """Drop every edge heavier than ``d0``; nodes are kept as-is."""
    if d0 < 1:
        raise InvalidValueError("d0 must be >= 1")
    kept = tuple(e for e in graph.edges if e[2] <= d0)
    return ReducedGraph(graph.nodes, kept, d0=int(d0))


def default_d0(graph: ReducedGraph, permissive: bool = False) -> int:
    """Smallest integer strictly greater than the mean edge weight.

    An edgeless graph has no mean; ``permissive=True`` falls back to the
    full dimension (which leaves any graph untouched when thresholding),
    otherwise the edgeless case is an error.
    """
    if not graph.edges:
        if permissive:
            return graph.dim
        raise EmptyGraphError("graph has no edges; no mean weight exists")
    mean = sum(w for _, _, w in graph.edges) / len(graph.edges)
    return int(mean) + 1


def start_node(graph: ReducedGraph) -> SignLabel:
    """Node minimizing the summed label distance to every other node.

    The sum runs over all nodes, not over graph paths.  Ties resolve to
    the first node in ascending label order ('+' before '-'), which is
    the storage order of ``nodes``.
    """
    if not graph.nodes:
        raise EmptyGraphError("graph has no nodes")
    if len(graph.nodes) == 1:
        return graph.nodes[0]
    sums = levenshtein_matrix(graph.nodes).sum(axis=1)
    return graph.nodes[int(np.argmin(sums))]


def bfs_components(
    graph: ReducedGraph, start: Optional[SignLabel] = None
) -> list[list[SignLabel]]:
    """Breadth-first orders, one list per connected component.

    The component holding ``start`` (default: the graph's start node)
    comes first and is walked from ``start``.  Remaining components are
    ordered by descending size then ascending minimal label, and each is
    walked from its own summed-distance minimizer.  Neighbor expansion
    always goes in ascending (edge weight, label) order.
    """
    if start is None:
        start = start_node(graph)
    start_idx = graph.node_index(start)
    adj = graph.adjacency()

    def walk(from_idx: int) -> list[int]:
        seen = {from_idx}
        order = [from_idx]
        queue = deque([from_idx])
        while queue:
            cur = queue.popleft()
            for _, nbr in adj[cur]:
                if nbr not in seen:
                    seen.add(nbr)
                    order.append(nbr)
                    queue.append(nbr)
        return order

    first = walk(start_idx)
    assigned = set(first)
    rest_components = []
    for idx in range(len(graph.nodes)):
        if idx not in assigned:
            comp = walk(idx)
            assigned.update(comp)
            rest_components.append(comp)

    def component_start(comp: list[int]) -> int:
        members = sorted(comp)
        sub = levenshtein_matrix([graph.nodes[i] for i in members])
        return members[int(np.argmin(sub.sum(axis=1)))]

    # node index order is label order, so min(comp) is the minimal label
    rest_components.sort(key=lambda comp: (-len(comp), min(comp)))
    ordered = [first] + [walk(component_start(comp)) for comp in rest_components]
    return [[graph.nodes[i] for i in comp] for comp in ordered]


def bfs_order(graph: ReducedGraph, start: SignLabel) -> list[SignLabel]:
    """Flat node enumeration: the concatenation of ``bfs_components``."""
    return [lbl for comp in bfs_components(graph, start) for lbl in comp]
