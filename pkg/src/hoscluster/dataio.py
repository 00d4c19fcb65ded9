"""File loading and writing: vectors, corpora, embeddings, results.

Vector files are CSV (header row, numeric columns are coordinates) or the
common word-vector text layout (token then D floats per line, optional
"count dim" header).  Corpora are JSONL with one {"id", "text", "label"}
object per line.  All emitted formats carry a format_version marker; CSV
files carry it as a leading "#" comment that readers skip.
"""

from __future__ import annotations

import csv
import hashlib
import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .clustering import ClusteringResult
from .errors import (
    DuplicateIdError,
    EmptySetError,
    InconsistentDimensionError,
    InvalidValueError,
    NoResolvableWordsError,
    ParseError,
    ZeroVectorError,
    ZeroVectorLineError,
)
from .evaluation import Document, LabeledCorpus, WordEmbeddingTable
from .geometry import UnitPoint, UnitPointSet, normalize
from .signlabels import sign_matrix

FORMAT_VERSION = 1
_VERSION_COMMENT = f"# format_version={FORMAT_VERSION}"
_TOKEN_PATTERN = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class VectorFileSpec:
    """Where and how to read point vectors."""

    path: str
    format: str = "csv"
    id_column: Optional[str] = None
    label_column: Optional[str] = None

    def __post_init__(self):
        if self.format not in ("csv", "embedding_text"):
            raise InvalidValueError(f"unknown vector format {self.format!r}")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric characters."""
    return _TOKEN_PATTERN.findall(text.lower())


def load_stopwords(path) -> frozenset[str]:
    """One lowercase word per line; blank lines ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word:
                words.add(word)
    return frozenset(words)


def _parse_float(text: str, line_no: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", line_no)


def _normalize_row(values: list[float], line_no: int) -> np.ndarray:
    try:
        return normalize(values)
    except ZeroVectorError:
        raise ZeroVectorLineError("row is an all-zero vector", line_no)
    except InvalidValueError as exc:
        raise ParseError(str(exc), line_no)


def load_vectors(spec: VectorFileSpec) -> UnitPointSet:
    """Read, normalize and id-stamp the vectors described by ``spec``.

    Ids come from ``id_column`` when named (and must be 0..N-1 in some
    order), otherwise from row order.  Rows that cannot be parsed raise
    with their 1-based line number.
    """
    if spec.format == "csv":
        return _load_vectors_csv(spec)
    return _load_vectors_embedding_text(spec)


def _load_vectors_csv(spec: VectorFileSpec) -> UnitPointSet:
    with open(spec.path, newline="", encoding="utf-8") as fh:
        numbered = [
            (no, line)
            for no, line in enumerate(fh, start=1)
            if line.strip() and not line.startswith("#")
        ]
    if not numbered:
        raise EmptySetError(f"{spec.path}: empty vector file")
    parsed = list(csv.reader(line for _, line in numbered))
    header = parsed[0]
    rows = parsed[1:]
    line_numbers = [no for no, _ in numbered[1:]]
    if not rows:
        raise EmptySetError(f"{spec.path}: no data rows")

    skip = {name for name in (spec.id_column, spec.label_column) if name}
    missing = skip - set(header)
    if missing:
        raise InvalidValueError(f"column(s) {sorted(missing)} not in header {header}")

    candidate_cols = [i for i, name in enumerate(header) if name not in skip]
    # Numeric columns are detected on the first data row; the rest are metadata.
    coord_cols = []
    for i in candidate_cols:
        try:
            float(rows[0][i])
        except (ValueError, IndexError):
            continue
        coord_cols.append(i)
    if not coord_cols:
        raise ParseError("no numeric coordinate columns detected", line_numbers[0])

    id_idx = header.index(spec.id_column) if spec.id_column else None
    coords = []
    ids = []
    for row, line_no in zip(rows, line_numbers):
        if len(row) != len(header):
            raise InconsistentDimensionError(
                f"expected {len(header)} fields, got {len(row)}", line_no
            )
        values = [_parse_float(row[i], line_no) for i in coord_cols]
        coords.append(_normalize_row(values, line_no))
        if id_idx is not None:
            try:
                ids.append(int(row[id_idx]))
            except ValueError:
                raise ParseError(f"bad id value {row[id_idx]!r}", line_no)
    id_array = np.asarray(ids, dtype=np.int64) if ids else None
    return UnitPointSet(np.vstack(coords), id_array if id_array is not None else np.arange(len(coords)))


def _load_vectors_embedding_text(spec: VectorFileSpec) -> UnitPointSet:
    coords = []
    with open(spec.path, encoding="utf-8") as fh:
        lines = fh.readlines()
    start = 0
    if lines and _looks_like_count_dim_header(lines[0]):
        start = 1
    dim = None
    for offset in range(start, len(lines)):
        line = lines[offset].strip()
        if not line:
            continue
        line_no = offset + 1
        parts = line.split()
        values = [_parse_float(p, line_no) for p in parts[1:]]
        if not values:
            raise ParseError("line has a token but no coordinates", line_no)
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise InconsistentDimensionError(
                f"expected {dim} coordinates, got {len(values)}", line_no
            )
        coords.append(_normalize_row(values, line_no))
    if not coords:
        raise EmptySetError(f"{spec.path}: no vectors found")
    return UnitPointSet(np.vstack(coords), np.arange(len(coords)))


def _looks_like_count_dim_header(line: str) -> bool:
    parts = line.split()
    return len(parts) == 2 and all(p.isdigit() for p in parts)


def load_embedding_table(path) -> WordEmbeddingTable:
    """Word-vector text file -> embedding table (first occurrence wins)."""
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    start = 1 if lines and _looks_like_count_dim_header(lines[0]) else 0
    dim = None
    for offset in range(start, len(lines)):
        line = lines[offset].strip()
        if not line:
            continue
        line_no = offset + 1
        parts = line.split()
        word = parts[0]
        values = [_parse_float(p, line_no) for p in parts[1:]]
        if not values:
            raise ParseError("line has a token but no coordinates", line_no)
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise InconsistentDimensionError(
                f"expected {dim} coordinates, got {len(values)}", line_no
            )
        if word not in vectors:
            vectors[word] = np.asarray(values, dtype=np.float64)
    if not vectors:
        raise EmptySetError(f"{path}: no embeddings found")
    return WordEmbeddingTable(vectors, dim)


def load_corpus(path, stopwords: frozenset[str] = frozenset()) -> LabeledCorpus:
    """JSONL corpus: one {"id": int, "text": str, "label": str} per line."""
    docs = []
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad JSON: {exc.msg}", line_no)
            if not isinstance(obj, dict) or not {"id", "text", "label"} <= obj.keys():
                raise ParseError('object must carry "id", "text" and "label"', line_no)
            try:
                doc_id = int(obj["id"])
            except (TypeError, ValueError):
                raise ParseError(f"bad id {obj['id']!r}", line_no)
            if doc_id in seen_ids:
                raise DuplicateIdError(f"duplicate document id {doc_id}", line_no)
            seen_ids.add(doc_id)
            tokens = tuple(
                tok for tok in tokenize(str(obj["text"])) if tok not in stopwords
            )
            docs.append(Document(doc_id, tokens, str(obj["label"])))
    if not docs:
        raise EmptySetError(f"{path}: corpus holds no documents")
    return LabeledCorpus(tuple(docs))


def mean_word_embedding(
    tokens: Sequence[str], table: WordEmbeddingTable, point_id: int = 0
) -> UnitPoint:
    """Normalized arithmetic mean of the resolvable tokens' vectors."""
    resolved = [table.get(tok) for tok in tokens if tok in table]
    if not resolved:
        raise NoResolvableWordsError("no token resolves in the embedding table")
    mean = np.mean(np.vstack(resolved), axis=0)
    return UnitPoint(point_id, normalize(mean))


def input_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_assignments(result: ClusteringResult, path) -> None:
    """CSV of point_id,cluster_id rows sorted by point id; noise is -1."""
    mapping = result.assignment_map()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(_VERSION_COMMENT + "\n")
        fh.write("point_id,cluster_id\n")
        for pid in sorted(mapping):
            fh.write(f"{pid},{mapping[pid]}\n")


def read_assignments(path) -> dict[int, int]:
    """Inverse of ``write_assignments``: point id -> cluster id (-1 noise)."""
    mapping: dict[int, int] = {}
    with open(path, encoding="utf-8") as fh:
        line_no = 0
        header_seen = False
        for line in fh:
            line_no += 1
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                header_seen = True
                if line != "point_id,cluster_id":
                    raise ParseError(f"unexpected header {line!r}", line_no)
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError(f"expected two fields, got {len(parts)}", line_no)
            try:
                pid, cid = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer fields {parts!r}", line_no)
            if pid in mapping:
                raise DuplicateIdError(f"duplicate point id {pid}", line_no)
            mapping[pid] = cid
    if not mapping:
        raise EmptySetError(f"{path}: no assignment rows")
    return mapping


def result_from_assignments(mapping: dict[int, int]) -> ClusteringResult:
    """Rebuild a minimal result object from an id -> cluster mapping."""
    clusters: dict[int, list[int]] = {}
    noise = []
    for pid, cid in mapping.items():
        if cid < 0:
            noise.append(pid)
        else:
            clusters.setdefault(cid, []).append(pid)
    ordered = tuple(
        tuple(sorted(clusters[cid])) for cid in sorted(clusters)
    )
    return ClusteringResult(
        clusters=ordered,
        noise=tuple(sorted(noise)),
        label_groups=tuple(() for _ in ordered),
        stats={"method": "loaded", "N_prime": len(mapping)},
    )


def write_stats(
    result: ClusteringResult,
    path,
    config: Optional[dict] = None,
    input_hash: Optional[str] = None,
) -> None:
    """Stats JSON: run statistics plus the resolved configuration."""
    doc = {
        "format_version": FORMAT_VERSION,
        "stats": result.stats,
        "cluster_count": result.cluster_count,
        "noise_count": len(result.noise),
    }
    if config is not None:
        doc["config"] = config
    if input_hash is not None:
        doc["input_sha256"] = input_hash
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_vectors_csv(points: UnitPointSet, path) -> None:
    """point_id plus one column per coordinate; loads back via id_column."""
    dim = points.dim
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(_VERSION_COMMENT + "\n")
        fh.write("point_id," + ",".join(f"c{k + 1}" for k in range(dim)) + "\n")
        for row in range(len(points)):
            values = ",".join(repr(float(x)) for x in points.coords[row])
            fh.write(f"{int(points.ids[row])},{values}\n")


def write_sweep_csv(
    rows: Iterable[tuple[float, int, int]], path, config: Optional[dict] = None
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(_VERSION_COMMENT + "\n")
        if config is not None:
            fh.write("# config=" + json.dumps(config, sort_keys=True) + "\n")
        fh.write("param,clusters,noise\n")
        for value, n_clusters, n_noise in rows:
            fh.write(f"{value!r},{n_clusters},{n_noise}\n")


def write_correlations_csv(
    samples: Iterable[tuple[float, float, float]], path, config: Optional[dict] = None
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(_VERSION_COMMENT + "\n")
        if config is not None:
            fh.write("# config=" + json.dumps(config, sort_keys=True) + "\n")
        fh.write("angular,euclidean,levenshtein\n")
        for ang, euc, lev in samples:
            fh.write(f"{ang!r},{euc!r},{lev!r}\n")


def write_sign_matrix(
    points: UnitPointSet, path, point_ids: Optional[Sequence[int]] = None
) -> None:
    """Rows of +-1 coordinate signs, one per point, keyed by point id."""
    signs = sign_matrix(points)
    rows = range(len(points))
    if point_ids is not None:
        wanted = set(int(p) for p in point_ids)
        rows = [r for r in rows if int(points.ids[r]) in wanted]
    dim = points.dim
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(_VERSION_COMMENT + "\n")
        fh.write("point_id," + ",".join(f"s{k + 1}" for k in range(dim)) + "\n")
        for row in sorted(rows, key=lambda r: int(points.ids[r])):
            fh.write(
                f"{int(points.ids[row])}," + ",".join(str(int(s)) for s in signs[row]) + "\n"
            )


def write_measure_report(report, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_rotation_plan(plan, dim: int, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan.to_json_dict(dim), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_rotation_plan(path):
    from .rotation import RotationPlan

    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", exc.lineno)
    return RotationPlan.from_json_dict(doc)
