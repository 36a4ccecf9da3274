"""Reading and writing graph classification datasets in the TUDataset text format.

A dataset ``DS`` is a directory with

- ``DS_A.txt``: one directed edge per line, ``i, j``, 1-indexed global node ids;
- ``DS_graph_indicator.txt``: line t holds the graph id of node t;
- ``DS_graph_labels.txt``: line g holds the class label of graph g;
- ``DS_node_labels.txt``: line t holds the label of node t;
- ``DS_edge_labels.txt`` (optional): line r holds the label of the edge on line r of ``DS_A.txt``.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np

from app.errors import IndexOutOfRange, IoFailure, MalformedLine, MissingFile
from app.graphs import LabeledGraph, ensure_valid

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class Dataset:
    graphs: tuple[LabeledGraph, ...]
    class_labels: tuple[int, ...]
    vertex_label_tokens: tuple[str, ...]
    edge_label_tokens: tuple[str, ...]
    source_path: str
    name: str
    has_edge_labels: bool = True

    @property
    def label_dictionaries(self) -> dict[str, dict[int, str]]:
        return {
            "vertex": dict(enumerate(self.vertex_label_tokens)),
            "edge": dict(enumerate(self.edge_label_tokens)),
        }


def _token_order(token: str):
    try:
        return (0, int(token), token)
    except ValueError:
        return (1, 0, token)


def _intern(tokens: Sequence[str]) -> tuple[list[int], tuple[str, ...]]:
    alphabet = tuple(sorted(set(tokens), key=_token_order))
    index = {token: i for i, token in enumerate(alphabet)}
    return [index[token] for token in tokens], alphabet


def _read_lines(path: Path) -> list[str]:
    if not path.is_file():
        raise MissingFile(str(path))
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    while lines and not lines[-1].strip():
        lines.pop()
    return lines


def _read_tokens(path: Path) -> list[str]:
    tokens = []
    for line_no, line in enumerate(_read_lines(path), start=1):
        token = line.strip()
        if not token:
            raise MalformedLine(path.name, line_no, "empty line")
        tokens.append(token)
    return tokens


def _read_ints(path: Path) -> list[int]:
    values = []
    for line_no, token in enumerate(_read_tokens(path), start=1):
        try:
            values.append(int(token))
        except ValueError:
            raise MalformedLine(path.name, line_no, f"expected an integer, got {token!r}") from None
    return values


def _dataset_name(directory: Path) -> str:
    if (directory / f"{directory.name}_A.txt").is_file():
        return directory.name
    candidates = sorted(directory.glob("*_A.txt"))
    if len(candidates) != 1:
        raise MissingFile(str(directory / "<name>_A.txt"))
    return candidates[0].name[: -len("_A.txt")]


def parse_dataset(directory: PathLike) -> Dataset:
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingFile(str(directory))
    name = _dataset_name(directory)
    prefix = directory / name

    indicator = _read_ints(Path(f"{prefix}_graph_indicator.txt"))
    class_labels = _read_ints(Path(f"{prefix}_graph_labels.txt"))
    node_tokens = _read_tokens(Path(f"{prefix}_node_labels.txt"))
    edge_path = Path(f"{prefix}_A.txt")
    edge_lines = _read_lines(edge_path)
    edge_label_path = Path(f"{prefix}_edge_labels.txt")
    has_edge_labels = edge_label_path.is_file()
    edge_tokens = _read_tokens(edge_label_path) if has_edge_labels else []

    node_count = len(indicator)
    graph_count = len(class_labels)
    if len(node_tokens) != node_count:
        raise MalformedLine(
            f"{name}_node_labels.txt",
            min(len(node_tokens), node_count) + 1,
            f"expected {node_count} node labels, found {len(node_tokens)}",
        )
    if has_edge_labels and len(edge_tokens) != len(edge_lines):
        raise MalformedLine(
            edge_label_path.name,
            min(len(edge_tokens), len(edge_lines)) + 1,
            f"expected {len(edge_lines)} edge labels, found {len(edge_tokens)}",
        )

    members: list[list[int]] = [[] for _ in range(graph_count)]
    local = [0] * node_count
    for t, graph_id in enumerate(indicator):
        if not 1 <= graph_id <= graph_count:
            raise IndexOutOfRange(f"{name}_graph_indicator.txt", t + 1, graph_id, graph_count)
        local[t] = len(members[graph_id - 1])
        members[graph_id - 1].append(t)

    vertex_ids, vertex_alphabet = _intern(node_tokens)
    edge_ids, edge_alphabet = _intern(edge_tokens) if has_edge_labels else ([], ())

    edges_per_graph: list[dict[tuple[int, int], int]] = [{} for _ in range(graph_count)]
    for r, line in enumerate(edge_lines):
        parts = [part.strip() for part in line.split(",")]
        if len(parts) != 2:
            raise MalformedLine(edge_path.name, r + 1, "expected 'i, j'")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLine(edge_path.name, r + 1, "node ids must be integers") from None
        for node in (i, j):
            if not 1 <= node <= node_count:
                raise IndexOutOfRange(edge_path.name, r + 1, node, node_count)
        gi, gj = indicator[i - 1], indicator[j - 1]
        if gi != gj:
            raise MalformedLine(edge_path.name, r + 1, f"edge joins graphs {gi} and {gj}")
        if i == j:
            raise MalformedLine(edge_path.name, r + 1, "self-loop")
        label = edge_ids[r] if has_edge_labels else 0
        edges = edges_per_graph[gi - 1]
        key = (local[i - 1], local[j - 1])
        if key in edges and edges[key] != label:
            logger.warning("%s:%d: conflicting labels for a repeated edge; keeping the first", edge_path.name, r + 1)
            continue
        edges.setdefault(key, label)

    graphs = []
    mirrored = 0
    for g_index, (nodes, edges) in enumerate(zip(members, edges_per_graph)):
        for (a, b), label in list(edges.items()):
            if (b, a) not in edges:
                edges[(b, a)] = label
                mirrored += 1
            elif edges[(b, a)] != label:
                logger.warning(
                    "graph %d: edge (%d,%d) is labeled differently per orientation; keeping the label of the lower one",
                    g_index + 1,
                    a,
                    b,
                )
                low = edges[(min(a, b), max(a, b))]
                edges[(a, b)] = edges[(b, a)] = low
        graphs.append(
            ensure_valid(
                LabeledGraph(
                    vertex_count=len(nodes),
                    edges=frozenset(edges),
                    vertex_labels=tuple(vertex_ids[t] for t in nodes),
                    edge_labels=edges,
                    name=str(g_index + 1),
                )
            )
        )
    if mirrored:
        logger.warning("%s: added %d missing mirror edge(s)", edge_path.name, mirrored)

    logger.info("Parsed dataset %s: %d graphs from %s", name, graph_count, directory)
    return Dataset(
        graphs=tuple(graphs),
        class_labels=tuple(class_labels),
        vertex_label_tokens=vertex_alphabet,
        edge_label_tokens=edge_alphabet,
        source_path=str(directory),
        name=name,
        has_edge_labels=has_edge_labels,
    )


def write_dataset(ds: Dataset, directory: PathLike, name: Optional[str] = None) -> Path:
    """Write ``ds`` in the text format; both orientations of every edge are listed."""
    name = name or ds.name
    directory = Path(directory)
    indicator, node_labels, edge_lines, edge_labels = [], [], [], []
    offset = 0
    for g_index, g in enumerate(ds.graphs, start=1):
        indicator.extend([str(g_index)] * g.vertex_count)
        node_labels.extend(ds.vertex_label_tokens[label] for label in g.vertex_labels)
        for i, j in sorted(g.edges):
            edge_lines.append(f"{i + offset + 1}, {j + offset + 1}")
            if ds.has_edge_labels:
                edge_labels.append(ds.edge_label_tokens[g.edge_labels[(i, j)]])
        offset += g.vertex_count

    files = {
        "A": edge_lines,
        "graph_indicator": indicator,
        "graph_labels": [str(label) for label in ds.class_labels],
        "node_labels": node_labels,
    }
    if ds.has_edge_labels:
        files["edge_labels"] = edge_labels
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for suffix, lines in files.items():
            text = "".join(f"{line}\n" for line in lines)
            (directory / f"{name}_{suffix}.txt").write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write dataset to {directory}: {exc}") from exc
    return directory


def dataset_statistics(ds: Dataset) -> dict[str, Any]:
    graphs = ds.graphs
    classes = Counter(ds.class_labels)
    vertices = np.array([g.vertex_count for g in graphs], dtype=np.float64)
    directed = np.array([g.directed_edge_count for g in graphs], dtype=np.float64)
    return {
        "name": ds.name,
        "graphs": len(graphs),
        "classes": {str(label): classes[label] for label in sorted(classes)},
        "mean_vertices": float(vertices.mean()) if len(graphs) else 0.0,
        "mean_directed_edges": float(directed.mean()) if len(graphs) else 0.0,
        "mean_undirected_edges": float(directed.mean() / 2) if len(graphs) else 0.0,
        "vertex_labels": len(ds.vertex_label_tokens),
        "edge_labels": len(ds.edge_label_tokens) if ds.has_edge_labels else 1,
        "max_degree": max((g.max_degree for g in graphs), default=0),
        "connected_graphs": sum(1 for g in graphs if g.is_connected()),
    }
