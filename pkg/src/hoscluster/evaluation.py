"""Cluster quality measures for topic detection over a labeled corpus.

Four measures: mean pairwise cosine similarity of each cluster's top
words, summed pairwise pointwise mutual information of those words,
majority-topic classification accuracy, and adjusted mutual information
against the ground-truth topics.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Hashable, Mapping, Optional, Sequence

import numpy as np

from .clustering import ClusteringResult
from .errors import (
    DegenerateInputError,
    EmptyClusterError,
    IdMismatchError,
    InvalidValueError,
    NoClustersError,
    NoResolvableWordsError,
)

PMI_EPSILON = 1e-12


@dataclass(frozen=True)
class Document:
    """One tokenized document with its ground-truth topic label."""

    doc_id: int
    tokens: tuple[str, ...]
    label: str


@dataclass(frozen=True, eq=False)
class LabeledCorpus:
    """Documents whose ids align with the point ids of the clustered set."""

    docs: tuple[Document, ...]

    @cached_property
    def by_id(self) -> dict[int, Document]:
        return {doc.doc_id: doc for doc in self.docs}

    @cached_property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(tok for doc in self.docs for tok in doc.tokens)

    def document(self, doc_id: int) -> Document:
        try:
            return self.by_id[doc_id]
        except KeyError:
            raise IdMismatchError(f"no document with id {doc_id}")

    def labels_by_id(self) -> dict[int, str]:
        return {doc.doc_id: doc.label for doc in self.docs}

    def __len__(self) -> int:
        return len(self.docs)


@dataclass(frozen=True, eq=False)
class WordEmbeddingTable:
    """word -> embedding vector; all vectors share one dimension."""

    vectors: dict[str, np.ndarray]
    dim: int

    @classmethod
    def from_dict(cls, mapping: Mapping[str, Sequence[float]]) -> "WordEmbeddingTable":
        vectors = {}
        dim = None
        for word, vec in mapping.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.ndim != 1:
                raise InvalidValueError(f"embedding for {word!r} is not a vector")
            if not np.all(np.isfinite(arr)):
                raise InvalidValueError(f"embedding for {word!r} contains NaN/Inf")
            if dim is None:
                dim = arr.size
            elif arr.size != dim:
                raise InvalidValueError("all embeddings must share one dimension")
            vectors[word] = arr
        if dim is None:
            raise InvalidValueError("embedding table is empty")
        return cls(vectors, dim)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def get(self, word: str) -> Optional[np.ndarray]:
        return self.vectors.get(word)


@dataclass(frozen=True)
class MeasureReport:
    """A measure value plus its per-cluster breakdown and configuration."""

    measure: str
    value: float
    per_cluster: tuple
    config: dict

    def to_json_dict(self) -> dict:
        return {
            "format_version": 1,
            "measure": self.measure,
            "value": self.value,
            "per_cluster": list(self.per_cluster),
            "config": dict(self.config),
        }


def top_k_words(
    cluster: Sequence[int], corpus: LabeledCorpus, k: int
) -> list[str]:
    """The k most frequent tokens across the cluster's documents.

    Frequency counts token occurrences (not document frequency); ties
    break alphabetically.
    """
    if not cluster:
        raise EmptyClusterError("cannot rank words of an empty cluster")
    if k < 1:
        raise InvalidValueError("k must be >= 1")
    counts: Counter[str] = Counter()
    for doc_id in cluster:
        counts.update(corpus.document(doc_id).tokens)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [word for word, _ in ranked[:k]]


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def coherence_cosine(
    result: ClusteringResult,
    corpus: LabeledCorpus,
    table: WordEmbeddingTable,
    k: int = 10,
) -> MeasureReport:
    """Mean over clusters of the mean pairwise cosine similarity of top words.

    Words absent from the table are skipped and the pair count shrinks
    accordingly; clusters left with fewer than two resolvable words do not
    contribute.  If no cluster contributes the measure is undefined.
    """
    if not result.clusters:
        raise NoClustersError("coherence needs at least one cluster")
    per_cluster = []
    values = []
    for members in result.clusters:
        words = [w for w in top_k_words(members, corpus, k) if w in table]
        if len(words) < 2:
            per_cluster.append(None)
            continue
        sims = [
            _cosine(table.get(x), table.get(y)) for x, y in combinations(words, 2)
        ]
        value = float(sum(sims) / len(sims))
        per_cluster.append(value)
        values.append(value)
    if not values:
        raise NoResolvableWordsError(
            "no cluster has two or more words resolvable in the embedding table"
        )
    return MeasureReport(
        measure="coherence_cosine",
        value=float(sum(values) / len(values)),
        per_cluster=tuple(per_cluster),
        config={"top_k": k, "skipped_clusters": per_cluster.count(None)},
    )


def coherence_pmi(
    result: ClusteringResult,
    corpus: LabeledCorpus,
    k: int = 10,
) -> MeasureReport:
    """Mean over clusters of the summed pairwise PMI of top words.

    Probabilities are document-level over the whole corpus: p(x) is the
    fraction of documents containing x, p(x, y) the fraction containing
    both.  p(x, y) gets an additive epsilon (1e-12) so never co-occurring
    pairs stay finite.  Pair values are summed per cluster, not averaged.
    """
    if not result.clusters:
        raise NoClustersError("coherence needs at least one cluster")
    n_docs = len(corpus)
    doc_sets = {doc.doc_id: frozenset(doc.tokens) for doc in corpus.docs}
    df: Counter[str] = Counter()
    for tokens in doc_sets.values():
        df.update(tokens)

    def pair_df(x: str, y: str) -> int:
        return sum(1 for tokens in doc_sets.values() if x in tokens and y in tokens)

    per_cluster = []
    for members in result.clusters:
        words = top_k_words(members, corpus, k)
        total = 0.0
        for x, y in combinations(words, 2):
            px = df[x] / n_docs
            py = df[y] / n_docs
            pxy = pair_df(x, y) / n_docs
            total += math.log((pxy + PMI_EPSILON) / (px * py))
        per_cluster.append(total)
    return MeasureReport(
        measure="coherence_pmi",
        value=float(sum(per_cluster) / len(per_cluster)),
        per_cluster=tuple(per_cluster),
        config={"top_k": k, "epsilon": PMI_EPSILON},
    )


@dataclass(frozen=True)
class MajoritySummary:
    """Majority-topic classification outcome."""

    m: int
    t: int
    accuracy: float
    coverage: float
    predictions: tuple[str, ...]

    def to_report(self) -> MeasureReport:
        return MeasureReport(
            measure="topic_majority",
            value=self.accuracy,
            per_cluster=self.predictions,
            config={"m": self.m, "t": self.t, "coverage": self.coverage},
        )


def topic_majority(result: ClusteringResult, corpus: LabeledCorpus) -> MajoritySummary:
    """Predict each cluster's plurality topic and score the classification.

    m counts clusters whose top topic is a strict majority (> 50 percent);
    t is the cluster count.  Accuracy is measured over clustered documents
    only; coverage reports the clustered fraction of the corpus.  Plurality
    ties break alphabetically and never count toward m.
    """
    if not result.clusters:
        raise NoClustersError("majority scoring needs at least one cluster")
    m = 0
    correct = 0
    clustered = 0
    predictions = []
    for members in result.clusters:
        labels = [corpus.document(doc_id).label for doc_id in members]
        counts = Counter(labels)
        top_label, top_count = sorted(
            counts.items(), key=lambda item: (-item[1], item[0])
        )[0]
        predictions.append(top_label)
        if 2 * top_count > len(labels):
            m += 1
        correct += top_count
        clustered += len(labels)
    return MajoritySummary(
        m=m,
        t=len(result.clusters),
        accuracy=correct / clustered,
        coverage=clustered / len(corpus),
        predictions=tuple(predictions),
    )


def _contingency(
    u_labels: Sequence[Hashable], v_labels: Sequence[Hashable]
) -> np.ndarray:
    u_index = {lbl: i for i, lbl in enumerate(sorted(set(u_labels), key=str))}
    v_index = {lbl: i for i, lbl in enumerate(sorted(set(v_labels), key=str))}
    table = np.zeros((len(u_index), len(v_index)), dtype=np.int64)
    for u, v in zip(u_labels, v_labels):
        table[u_index[u], v_index[v]] += 1
    return table


def mutual_information(contingency: np.ndarray) -> float:
    """MI in nats of the joint distribution given by a contingency table."""
    table = np.asarray(contingency, dtype=np.float64)
    n = table.sum()
    if n <= 0:
        raise DegenerateInputError("empty contingency table")
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    mi = 0.0
    for i in range(table.shape[0]):
        for j in range(table.shape[1]):
            nij = table[i, j]
            if nij > 0:
                mi += (nij / n) * math.log(n * nij / (a[i] * b[j]))
    return mi


def expected_mutual_information(contingency: np.ndarray) -> float:
    """E[MI] under the permutation model with fixed marginals.

    Sums, for every cell, the MI contribution of each feasible cell count
    weighted by its hypergeometric probability; probabilities come from
    exact log-factorials.
    """
    table = np.asarray(contingency, dtype=np.int64)
    n = int(table.sum())
    if n <= 0:
        raise DegenerateInputError("empty contingency table")
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    lg = math.lgamma
    emi = 0.0
    for ai in a:
        for bj in b:
            ai_i, bj_i = int(ai), int(bj)
            lo = max(1, ai_i + bj_i - n)
            hi = min(ai_i, bj_i)
            for nij in range(lo, hi + 1):
                log_p = (
                    lg(ai_i + 1)
                    + lg(bj_i + 1)
                    + lg(n - ai_i + 1)
                    + lg(n - bj_i + 1)
                    - lg(n + 1)
                    - lg(nij + 1)
                    - lg(ai_i - nij + 1)
                    - lg(bj_i - nij + 1)
                    - lg(n - ai_i - bj_i + nij + 1)
                )
                emi += math.exp(log_p) * (nij / n) * math.log(n * nij / (ai_i * bj_i))
    return emi


def _entropy(marginal: np.ndarray, n: float) -> float:
    probs = marginal[marginal > 0] / n
    return float(-(probs * np.log(probs)).sum())


def ami_from_labels(
    u_labels: Sequence[Hashable], v_labels: Sequence[Hashable]
) -> float:
    """Adjusted mutual information between two labelings of the same items.

    (MI - E[MI]) / (mean(H(U), H(V)) - E[MI]), arithmetic-mean normalizer.
    """
    if len(u_labels) != len(v_labels):
        raise IdMismatchError("labelings must cover the same items")
    if len(u_labels) < 2:
        raise DegenerateInputError("adjusted mutual information needs >= 2 points")
    table = _contingency(u_labels, v_labels)
    if table.shape[0] == 1 and table.shape[1] == 1:
        return 1.0
    n = float(table.sum())
    mi = mutual_information(table)
    emi = expected_mutual_information(table)
    h_u = _entropy(table.sum(axis=1).astype(np.float64), n)
    h_v = _entropy(table.sum(axis=0).astype(np.float64), n)
    normalizer = 0.5 * (h_u + h_v)
    denominator = normalizer - emi
    if denominator == 0.0:
        return 0.0
    # Mirror the widespread convention: keep the denominator away from zero
    # with the sign it already has, so tiny negatives cannot blow up.
    tiny = np.finfo(np.float64).eps
    if denominator < 0:
        denominator = min(denominator, -tiny)
    else:
        denominator = max(denominator, tiny)
    return (mi - emi) / denominator


def adjusted_mutual_information(
    result: ClusteringResult,
    truth: Mapping[int, Hashable],
    noise_as_singletons: bool = False,
) -> float:
    """AMI of the clustering against ground-truth labels by point id.

    Noise points are excluded by default; with ``noise_as_singletons``
    each becomes its own one-point cluster instead.
    """
    pred: list[Hashable] = []
    true: list[Hashable] = []
    for idx, members in enumerate(result.clusters):
        for pid in members:
            if pid not in truth:
                raise IdMismatchError(f"no ground-truth label for point {pid}")
            pred.append(idx)
            true.append(truth[pid])
    if noise_as_singletons:
        for offset, pid in enumerate(result.noise):
            if pid not in truth:
                raise IdMismatchError(f"no ground-truth label for point {pid}")
            pred.append(len(result.clusters) + offset)
            true.append(truth[pid])
    return ami_from_labels(pred, true)
