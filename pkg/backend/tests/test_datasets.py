"""
Tests for dataset files and Gram matrix files.

Tests cover:
- Parsing the text dataset format and its error cases
- Writing datasets and dataset statistics
- Gram matrices in CSV and binary form
"""

import logging
import shutil
import struct

import numpy as np
import pytest

from app.datasets import dataset_statistics, parse_dataset, write_dataset
from app.errors import DimensionMismatch, IndexOutOfRange, IoFailure, MalformedLine, MissingFile
from app.gram import GramMatrix, ScalingParams
from app.gram_io import MAGIC, gram_to_csv, read_gram, write_gram


@pytest.fixture
def two_copy(tmp_path, two_dataset_dir):
    """Writable copy of the TWO dataset."""
    target = tmp_path / "TWO"
    shutil.copytree(two_dataset_dir, target)
    return target


def _write(directory, suffix, text):
    (directory / f"TWO_{suffix}.txt").write_text(text, encoding="utf-8")


class TestParseDataset:
    def test_two_graphs(self, two_dataset_dir):
        ds = parse_dataset(two_dataset_dir)
        assert ds.name == "TWO"
        assert ds.class_labels == (1, -1)
        assert len(ds.graphs) == 2
        edge, single = ds.graphs
        assert edge.vertex_count == 2
        assert edge.edges == frozenset({(0, 1), (1, 0)})
        assert edge.vertex_labels == (0, 1)
        assert single.vertex_count == 1
        assert single.edges == frozenset()
        assert [g.name for g in ds.graphs] == ["1", "2"]
        assert ds.vertex_label_tokens == ("0", "1")
        assert ds.edge_label_tokens == ("0",)
        assert ds.has_edge_labels

    def test_label_dictionaries(self, two_dataset_dir):
        ds = parse_dataset(two_dataset_dir)
        assert ds.label_dictionaries == {"vertex": {0: "0", 1: "1"}, "edge": {0: "0"}}

    def test_numeric_tokens_sort_numerically(self, two_copy):
        _write(two_copy, "node_labels", "10\n9\n10\n")
        ds = parse_dataset(two_copy)
        assert ds.vertex_label_tokens == ("9", "10")
        assert ds.graphs[0].vertex_labels == (1, 0)

    def test_missing_edge_labels_default_to_one_label(self, two_copy):
        (two_copy / "TWO_edge_labels.txt").unlink()
        ds = parse_dataset(two_copy)
        assert not ds.has_edge_labels
        assert ds.graphs[0].edge_label(0, 1) == 0

    def test_missing_mirror_edge_is_added_with_a_warning(self, two_copy, caplog):
        _write(two_copy, "A", "1, 2\n")
        _write(two_copy, "edge_labels", "0\n")
        with caplog.at_level(logging.WARNING, logger="app.datasets"):
            ds = parse_dataset(two_copy)
        assert ds.graphs[0].edges == frozenset({(0, 1), (1, 0)})
        assert "mirror" in caplog.text

    def test_missing_directory(self, tmp_path):
        with pytest.raises(MissingFile):
            parse_dataset(tmp_path / "nowhere")

    def test_missing_required_file(self, two_copy):
        (two_copy / "TWO_node_labels.txt").unlink()
        with pytest.raises(MissingFile) as exc_info:
            parse_dataset(two_copy)
        assert exc_info.value.path.endswith("TWO_node_labels.txt")

    def test_malformed_edge_line(self, two_copy):
        _write(two_copy, "A", "1, 2\n2 1\n")
        with pytest.raises(MalformedLine) as exc_info:
            parse_dataset(two_copy)
        assert exc_info.value.line_no == 2
        assert exc_info.value.file == "TWO_A.txt"

    def test_non_integer_graph_label(self, two_copy):
        _write(two_copy, "graph_labels", "1\nactive\n")
        with pytest.raises(MalformedLine) as exc_info:
            parse_dataset(two_copy)
        assert exc_info.value.line_no == 2

    def test_node_index_out_of_range(self, two_copy):
        _write(two_copy, "A", "1, 2\n2, 4\n")
        with pytest.raises(IndexOutOfRange) as exc_info:
            parse_dataset(two_copy)
        assert exc_info.value.index == 4
        assert exc_info.value.line_no == 2

    def test_graph_indicator_out_of_range(self, two_copy):
        _write(two_copy, "graph_indicator", "1\n1\n3\n")
        with pytest.raises(IndexOutOfRange):
            parse_dataset(two_copy)

    def test_edge_between_graphs(self, two_copy):
        _write(two_copy, "A", "2, 3\n3, 2\n")
        with pytest.raises(MalformedLine):
            parse_dataset(two_copy)

    def test_node_label_count_mismatch(self, two_copy):
        _write(two_copy, "node_labels", "0\n1\n")
        with pytest.raises(MalformedLine):
            parse_dataset(two_copy)


class TestWriteDataset:
    def test_written_dataset_parses_back(self, tmp_path, two_dataset_dir):
        ds = parse_dataset(two_dataset_dir)
        target = write_dataset(ds, tmp_path / "COPY", name="COPY")
        assert (target / "COPY_A.txt").read_text() == "1, 2\n2, 1\n"
        again = parse_dataset(target)
        assert again.name == "COPY"
        assert again.class_labels == ds.class_labels
        assert [g.edges for g in again.graphs] == [g.edges for g in ds.graphs]
        assert [g.vertex_labels for g in again.graphs] == [g.vertex_labels for g in ds.graphs]

    def test_write_failure(self, tmp_path, two_dataset_dir):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(IoFailure):
            write_dataset(parse_dataset(two_dataset_dir), blocker / "DS")


class TestDatasetStatistics:
    def test_two(self, two_dataset_dir):
        stats = dataset_statistics(parse_dataset(two_dataset_dir))
        assert stats["graphs"] == 2
        assert stats["classes"] == {"-1": 1, "1": 1}
        assert stats["mean_vertices"] == 1.5
        assert stats["mean_directed_edges"] == 1.0
        assert stats["mean_undirected_edges"] == 0.5
        assert stats["max_degree"] == 1
        assert stats["connected_graphs"] == 2

    def test_toy(self, toy_dataset_dir):
        stats = dataset_statistics(parse_dataset(toy_dataset_dir))
        assert stats["name"] == "TOY"
        assert stats["graphs"] == 12
        assert stats["classes"] == {"-1": 6, "1": 6}
        assert stats["mean_vertices"] == 5.5
        assert stats["mean_directed_edges"] == 10.0
        assert stats["vertex_labels"] == 2
        assert stats["edge_labels"] == 2
        assert stats["max_degree"] == 2


class TestGramFiles:
    @pytest.fixture
    def gram(self):
        return GramMatrix(
            values=np.array([[1.0, 1 / 3], [1 / 3, 2.5]]),
            graph_ids=("g1", "g2"),
            kernel_descriptor={"kernel": "tanimoto", "depth": 4},
            scaling=ScalingParams(lo=0.0, hi=3.0),
        )

    def test_csv_layout(self, gram):
        lines = gram_to_csv(gram).splitlines()
        assert lines[0] == "g1,g2"
        assert len(lines) == 3

    def test_csv_keeps_values_exactly(self, tmp_path, gram):
        target = tmp_path / "gram.csv"
        write_gram(gram, target)
        loaded = read_gram(target)
        assert loaded.graph_ids == gram.graph_ids
        assert np.array_equal(loaded.values, gram.values)

    def test_binary_keeps_descriptor_and_scaling(self, tmp_path, gram):
        target = tmp_path / "gram.bin"
        write_gram(gram, target, format="binary")
        data = target.read_bytes()
        assert data.startswith(MAGIC)
        assert struct.unpack_from("<Q", data, len(MAGIC)) == (2,)
        loaded = read_gram(target)
        assert np.array_equal(loaded.values, gram.values)
        assert loaded.kernel_descriptor == gram.kernel_descriptor
        assert loaded.scaling == gram.scaling

    def test_truncated_binary(self, tmp_path):
        target = tmp_path / "gram.bin"
        target.write_bytes(MAGIC + struct.pack("<Q", 3))
        with pytest.raises(IoFailure):
            read_gram(target)

    def test_binary_format_requires_magic(self, tmp_path):
        target = tmp_path / "gram.bin"
        target.write_text("a,b\n1,0\n0,1\n")
        with pytest.raises(IoFailure):
            read_gram(target, format="binary")

    def test_malformed_csv(self, tmp_path):
        target = tmp_path / "gram.csv"
        target.write_text("a,b\n1,x\n0,1\n")
        with pytest.raises(IoFailure):
            read_gram(target)

    def test_csv_shape_mismatch(self, tmp_path):
        target = tmp_path / "gram.csv"
        target.write_text("a,b,c\n1,0\n0,1\n")
        with pytest.raises(DimensionMismatch):
            read_gram(target)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoFailure):
            read_gram(tmp_path / "absent.csv")

    def test_unknown_format(self, tmp_path, gram):
        with pytest.raises(ValueError):
            write_gram(gram, tmp_path / "gram.txt", format="npy")
