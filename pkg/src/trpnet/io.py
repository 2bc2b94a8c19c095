"""Atomic file output, full-precision CSV, and the HEFF1 matrix dump."""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import FormatError

HEFF_MAGIC = b"HEFF1"


def atomic_write_bytes(path, data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def atomic_write_text(path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def fmt_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> Path:
    return atomic_write_text(path, csv_text(header, rows))


def read_csv(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [[float(x) for x in line.split(",")] for line in lines[1:] if line]
    return header, np.array(rows, dtype=float).reshape(-1, len(header))


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def heff_bytes(matrix: np.ndarray) -> bytes:
    """Serialize a square complex matrix: ``HEFF1``, u64 N, then N*N (re, im) f64 pairs, row-major, little-endian."""
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ValueError("matrix must be square")
    body = np.ascontiguousarray(matrix, dtype="<c16").tobytes()
    return HEFF_MAGIC + struct.pack("<Q", n) + body


def write_heff(path, matrix: np.ndarray) -> Path:
    return atomic_write_bytes(path, heff_bytes(matrix))


def read_heff(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if not data.startswith(HEFF_MAGIC):
        raise FormatError("missing HEFF1 magic")
    offset = len(HEFF_MAGIC)
    if len(data) < offset + 8:
        raise FormatError("truncated HEFF1 header")
    (n,) = struct.unpack_from("<Q", data, offset)
    offset += 8
    expected = offset + 16 * n * n
    if len(data) != expected:
        raise FormatError(f"HEFF1 payload is {len(data) - offset} bytes, expected {16 * n * n}")
    return np.frombuffer(data, dtype="<c16", offset=offset).reshape(n, n).astype(complex)
