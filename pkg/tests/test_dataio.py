"""Loaders, writers and their round trips."""

import json
import math

import numpy as np
import pytest

from hoscluster import (
    HosParams,
    UnitPointSet,
    WordEmbeddingTable,
    normalize,
    run_hos,
)
from hoscluster import dataio
from hoscluster.dataio import (
    VectorFileSpec,
    load_corpus,
    load_embedding_table,
    load_stopwords,
    load_vectors,
    mean_word_embedding,
    read_assignments,
    result_from_assignments,
    write_assignments,
    write_sign_matrix,
    write_stats,
    write_sweep_csv,
    write_vectors_csv,
)
from hoscluster.errors import (
    DuplicateIdError,
    EmptySetError,
    InconsistentDimensionError,
    NoResolvableWordsError,
    ParseError,
    ZeroVectorError,
    ZeroVectorLineError,
)


class TestLoadVectorsCsv:
    def test_basic_csv(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("x,y\n3,4\n")
        ps = load_vectors(VectorFileSpec(str(path)))
        np.testing.assert_allclose(ps.coords, [[0.6, 0.8]])
        assert list(ps.ids) == [0]

    def test_id_column(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("pid,x,y\n1,1,0\n0,0,2\n")
        ps = load_vectors(VectorFileSpec(str(path), id_column="pid"))
        assert list(ps.ids) == [1, 0]
        np.testing.assert_allclose(ps.coords[1], [0.0, 1.0])

    def test_label_column_ignored(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("x,y,topic\n1,0,sports\n0,1,tech\n")
        ps = load_vectors(VectorFileSpec(str(path), label_column="topic"))
        assert ps.dim == 2

    def test_non_numeric_metadata_column_skipped(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("token,x,y\nking,1,0\nqueen,0,1\n")
        ps = load_vectors(VectorFileSpec(str(path)))
        assert ps.dim == 2

    def test_ragged_row_reports_line(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("x,y\n1,0\n1\n")
        with pytest.raises(InconsistentDimensionError) as err:
            load_vectors(VectorFileSpec(str(path)))
        assert err.value.line == 3

    def test_zero_row_reports_line(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("x,y\n1,0\n0,0\n")
        with pytest.raises(ZeroVectorLineError) as err:
            load_vectors(VectorFileSpec(str(path)))
        assert err.value.line == 3

    def test_bad_number_reports_line(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("x,y\n1,0\n1,oops\n")
        with pytest.raises(ParseError) as err:
            load_vectors(VectorFileSpec(str(path)))
        assert err.value.line == 3

    def test_empty_file(self, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("")
        with pytest.raises(EmptySetError):
            load_vectors(VectorFileSpec(str(path)))


class TestLoadVectorsEmbeddingText:
    def test_tokens_and_header_autodetected(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("2 2\nking 0.1 0.2\nqueen 1 0\n")
        ps = load_vectors(VectorFileSpec(str(path), format="embedding_text"))
        assert len(ps) == 2
        np.testing.assert_allclose(ps.coords[0], normalize([0.1, 0.2]))

    def test_no_header(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("king 0.1 0.2\n")
        ps = load_vectors(VectorFileSpec(str(path), format="embedding_text"))
        np.testing.assert_allclose(ps.coords[0], normalize([0.1, 0.2]))

    def test_ragged_line_reported(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("a 1 2\nb 1\n")
        with pytest.raises(InconsistentDimensionError) as err:
            load_vectors(VectorFileSpec(str(path), format="embedding_text"))
        assert err.value.line == 2


class TestLoadCorpus:
    def test_basic(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(
            '{"id": 0, "text": "Hello world", "label": "tech"}\n'
            '{"id": 1, "text": "", "label": "sport"}\n'
        )
        corpus = load_corpus(str(path))
        assert corpus.docs[0].tokens == ("hello", "world")
        assert corpus.docs[1].tokens == ()
        assert corpus.docs[1].label == "sport"

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(
            '{"id": 0, "text": "a", "label": "x"}\n{"id": 0, "text": "b", "label": "y"}\n'
        )
        with pytest.raises(DuplicateIdError) as err:
            load_corpus(str(path))
        assert err.value.line == 2

    def test_bad_json_line_number(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": 0, "text": "a", "label": "x"}\nnot json\n')
        with pytest.raises(ParseError) as err:
            load_corpus(str(path))
        assert err.value.line == 2

    def test_stopwords_applied(self, tmp_path):
        stop = tmp_path / "stop.txt"
        stop.write_text("the\nof\n")
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": 0, "text": "The king of spain", "label": "x"}\n')
        corpus = load_corpus(str(path), stopwords=load_stopwords(str(stop)))
        assert corpus.docs[0].tokens == ("king", "spain")

    def test_tokenization_splits_non_alphanumeric(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"id": 0, "text": "e-mail, 2nd; World!", "label": "x"}\n')
        corpus = load_corpus(str(path))
        assert corpus.docs[0].tokens == ("e", "mail", "2nd", "world")


class TestEmbeddingTable:
    def test_load_and_query(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("2 3\nking 1 0 0\nqueen 0 1 0\n")
        table = load_embedding_table(str(path))
        assert table.dim == 3
        assert "king" in table and "pawn" not in table

    def test_first_occurrence_wins(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("a 1 0\na 0 1\n")
        table = load_embedding_table(str(path))
        np.testing.assert_allclose(table.get("a"), [1.0, 0.0])


class TestMeanWordEmbedding:
    def _table(self):
        return WordEmbeddingTable.from_dict(
            {"a": [1.0, 0.0], "b": [0.0, 1.0], "neg": [-1.0, 0.0]}
        )

    def test_single_token(self):
        point = mean_word_embedding(["a"], self._table(), point_id=3)
        assert point.id == 3
        np.testing.assert_allclose(point.coords, [1.0, 0.0])

    def test_opposite_vectors_degenerate(self):
        with pytest.raises(ZeroVectorError):
            mean_word_embedding(["a", "neg"], self._table())

    def test_multiset_mean(self):
        point = mean_word_embedding(["a", "a", "b"], self._table())
        np.testing.assert_allclose(point.coords, normalize([2 / 3, 1 / 3]))

    def test_unresolvable(self):
        with pytest.raises(NoResolvableWordsError):
            mean_word_embedding(["zzz"], self._table())


class TestAssignmentsRoundTrip:
    def test_round_trip(self, tmp_path, reference_50):
        points, _ = reference_50
        result = run_hos(points, HosParams(rotate=False))
        path = tmp_path / "a.csv"
        write_assignments(result, str(path))
        text = path.read_text()
        assert text.startswith("# format_version=1\npoint_id,cluster_id\n")
        mapping = read_assignments(str(path))
        assert mapping == result.assignment_map()
        rebuilt = result_from_assignments(mapping)
        assert rebuilt.clusters == result.clusters
        assert rebuilt.noise == result.noise

    def test_all_noise_file(self, tmp_path):
        from hoscluster.clustering import ClusteringResult

        result = ClusteringResult((), (0, 1, 2), (), {"method": "test"})
        path = tmp_path / "a.csv"
        write_assignments(result, str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[2:] == ["0,-1", "1,-1", "2,-1"]

    def test_cluster_ids_in_first_appearance_order(self, tmp_path):
        from hoscluster.clustering import ClusteringResult

        result = ClusteringResult(((0, 3), (1, 2)), (), ((), ()), {"method": "t"})
        path = tmp_path / "a.csv"
        write_assignments(result, str(path))
        rows = [line.split(",") for line in path.read_text().strip().splitlines()[2:]]
        assert rows == [["0", "0"], ["1", "1"], ["2", "1"], ["3", "0"]]


class TestVectorsRoundTrip:
    def test_write_then_load(self, tmp_path, reference_50):
        points, _ = reference_50
        path = tmp_path / "v.csv"
        write_vectors_csv(points, str(path))
        back = load_vectors(VectorFileSpec(str(path), id_column="point_id"))
        np.testing.assert_array_equal(back.ids, points.ids)
        np.testing.assert_allclose(back.coords, points.coords, atol=1e-15)


class TestStatsAndSweepFiles:
    def test_stats_json_shape(self, tmp_path, reference_50):
        points, _ = reference_50
        result = run_hos(points, HosParams(rotate=False))
        path = tmp_path / "stats.json"
        write_stats(result, str(path), config={"delta0": 4.0}, input_hash="ab" * 32)
        doc = json.loads(path.read_text())
        assert doc["format_version"] == 1
        assert doc["stats"]["N_occupied"] == 5
        assert doc["config"] == {"delta0": 4.0}
        assert doc["input_sha256"] == "ab" * 32

    def test_sweep_csv(self, tmp_path):
        path = tmp_path / "sweep.csv"
        write_sweep_csv([(0.5, 2, 1), (1.0, 3, 0)], str(path))
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "# format_version=1"
        assert lines[1] == "param,clusters,noise"
        assert lines[2] == "0.5,2,1"


class TestSignMatrixFile:
    def test_reference_clusters_have_few_sign_rows(self, tmp_path, reference_50):
        points, labels = reference_50
        path = tmp_path / "signs.csv"
        for group in range(5):
            ids = np.flatnonzero(labels == group).tolist()
            write_sign_matrix(points, str(path), point_ids=ids)
            rows = {
                line.split(",", 1)[1]
                for line in path.read_text().strip().splitlines()[2:]
            }
            assert len(rows) <= 3

    def test_entries_are_plus_minus_one(self, tmp_path, reference_50):
        points, _ = reference_50
        path = tmp_path / "signs.csv"
        write_sign_matrix(points, str(path))
        body = path.read_text().strip().splitlines()[2:]
        assert len(body) == len(points)
        values = {v for line in body for v in line.split(",")[1:]}
        assert values == {"1", "-1"}
