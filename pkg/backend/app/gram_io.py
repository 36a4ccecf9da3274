"""Gram matrix files: CSV with a header of graph ids, or a little-endian binary layout.

Binary layout: ``b"GRAM1"``, u64 N, N ids as (u64 byte length, UTF-8 bytes),
N*N float64 row-major, then a UTF-8 JSON trailer holding the kernel
descriptor and the scaling parameters.
"""

from __future__ import annotations

import csv
import io
import json
import struct
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np

from app.errors import DimensionMismatch, IoFailure
from app.gram import GramMatrix, ScalingParams

MAGIC = b"GRAM1"
Format = Literal["csv", "binary"]


def _trailer(m: GramMatrix) -> dict:
    scaling = None if m.scaling is None else {"lo": m.scaling.lo, "hi": m.scaling.hi}
    return {"kernel_descriptor": m.kernel_descriptor, "scaling": scaling}


def gram_to_csv(m: GramMatrix) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(m.graph_ids)
    for row in m.values:
        writer.writerow(["%.17g" % value for value in row])
    return buffer.getvalue()


def gram_to_bytes(m: GramMatrix) -> bytes:
    n = m.size
    parts = [MAGIC, struct.pack("<Q", n)]
    for graph_id in m.graph_ids:
        encoded = graph_id.encode("utf-8")
        parts.append(struct.pack("<Q", len(encoded)))
        parts.append(encoded)
    parts.append(np.ascontiguousarray(m.values, dtype="<f8").tobytes())
    parts.append(json.dumps(_trailer(m), sort_keys=True).encode("utf-8"))
    return b"".join(parts)


def write_gram(m: GramMatrix, path: Union[str, Path], format: Format = "csv") -> None:
    if m.values.shape != (m.size, m.size):
        raise DimensionMismatch(f"{m.size} ids for a matrix of shape {m.values.shape}")
    path = Path(path)
    try:
        if format == "csv":
            path.write_text(gram_to_csv(m), encoding="utf-8")
        elif format == "binary":
            path.write_bytes(gram_to_bytes(m))
        else:
            raise ValueError(f"unknown Gram format '{format}'")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _read_binary(data: bytes) -> GramMatrix:
    try:
        offset = len(MAGIC)
        (n,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        ids = []
        for _ in range(n):
            (length,) = struct.unpack_from("<Q", data, offset)
            offset += 8
            ids.append(data[offset : offset + length].decode("utf-8"))
            offset += length
        size = 8 * n * n
        if len(data) < offset + size:
            raise IoFailure("binary Gram file is truncated")
        values = np.frombuffer(data, dtype="<f8", count=n * n, offset=offset).reshape(n, n)
        trailer = json.loads(data[offset + size :].decode("utf-8") or "{}")
    except (struct.error, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IoFailure(f"malformed binary Gram file: {exc}") from exc
    scaling = trailer.get("scaling")
    return GramMatrix(
        values=values.astype(np.float64),
        graph_ids=tuple(ids),
        kernel_descriptor=trailer.get("kernel_descriptor") or {},
        scaling=None if scaling is None else ScalingParams(lo=scaling["lo"], hi=scaling["hi"]),
    )


def _read_csv(text: str) -> GramMatrix:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise IoFailure("empty CSV Gram file")
    ids = tuple(rows[0])
    try:
        values = np.array([[float(v) for v in row] for row in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise IoFailure(f"malformed CSV Gram file: {exc}") from exc
    values = values.reshape(len(rows) - 1, -1) if len(rows) > 1 else np.zeros((0, 0))
    if values.shape != (len(ids), len(ids)):
        raise DimensionMismatch(f"{len(ids)} ids for a matrix of shape {values.shape}")
    return GramMatrix(values=values, graph_ids=ids, kernel_descriptor={})


def read_gram(path: Union[str, Path], format: Optional[Format] = None) -> GramMatrix:
    """Read a Gram file; the format is detected from the magic bytes when not given."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if format is None:
        format = "binary" if data.startswith(MAGIC) else "csv"
    if format == "binary":
        if not data.startswith(MAGIC):
            raise IoFailure(f"{path} does not start with {MAGIC!r}")
        return _read_binary(data)
    return _read_csv(data.decode("utf-8"))
