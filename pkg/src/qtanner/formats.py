"""File formats: MacKay alist, MatrixMarket, JSON spec/config files, export sidecars.

Indices in alist and MatrixMarket files are 1-based; everything in memory is
0-based. That conversion happens only in this module.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .construction import QUBIT_INDEX_CONVENTION, CodeSpec, CssCode
from .errors import SpecError
from .gf2 import BitMatrix

__all__ = [
    "FormatError",
    "export_alist",
    "export_matrixmarket",
    "import_alist",
    "import_matrix",
    "import_matrixmarket",
    "parse_alist",
    "read_json",
    "read_spec",
    "spec_hash",
    "to_alist",
    "write_code",
    "write_spec",
    "write_text_atomic",
]


class FormatError(ValueError):
    """Malformed input file; the message carries a byte offset."""


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


# -- alist ------------------------------------------------------------------


def to_alist(m: BitMatrix) -> str:
    dense = m.to_dense().astype(bool)
    col_w = dense.sum(axis=0).astype(int)
    row_w = dense.sum(axis=1).astype(int)
    max_c = int(col_w.max()) if m.cols else 0
    max_r = int(row_w.max()) if m.rows else 0
    lines = [f"{m.cols} {m.rows}", f"{max_c} {max_r}"]
    lines.append(" ".join(map(str, col_w)))
    lines.append(" ".join(map(str, row_w)))
    for c in range(m.cols):
        idx = list(np.flatnonzero(dense[:, c]) + 1)
        lines.append(" ".join(map(str, idx + [0] * (max_c - len(idx)))))
    for r in range(m.rows):
        idx = list(np.flatnonzero(dense[r]) + 1)
        lines.append(" ".join(map(str, idx + [0] * (max_r - len(idx)))))
    return "\n".join(lines) + "\n"


def parse_alist(text: str) -> BitMatrix:
    lines = text.split("\n")
    offsets = np.cumsum([0] + [len(line.encode()) + 1 for line in lines]).tolist()
    cursor = [0]

    def next_ints(what: str) -> list[int]:
        i = cursor[0]
        if i >= len(lines):
            raise FormatError(f"unexpected end of file reading {what} at byte {offsets[min(i, len(offsets) - 1)]}")
        cursor[0] += 1
        try:
            return [int(tok) for tok in lines[i].split()]
        except ValueError:
            raise FormatError(f"non-integer token in {what} at byte {offsets[i]}") from None

    def fail(msg: str, line: int) -> FormatError:
        return FormatError(f"{msg} at byte {offsets[line]}")

    head = next_ints("header")
    if len(head) != 2 or min(head) < 0:
        raise fail("header must be 'n m'", 0)
    n, m = head
    maxes = next_ints("maximum weights")
    if len(maxes) != 2:
        raise fail("second line must hold two maximum weights", 1)
    max_c, max_r = maxes
    col_w = next_ints("column weights") if n else (next_ints("column weights") or [])
    if len(col_w) != n:
        raise fail(f"expected {n} column weights", 2)
    row_w = next_ints("row weights") if m else (next_ints("row weights") or [])
    if len(row_w) != m:
        raise fail(f"expected {m} row weights", 3)
    if (col_w and max(col_w) != max_c) or (not col_w and max_c != 0):
        raise fail("maximum column weight disagrees with the column weights", 1)
    if (row_w and max(row_w) != max_r) or (not row_w and max_r != 0):
        raise fail("maximum row weight disagrees with the row weights", 1)
    dense = np.zeros((m, n), dtype=np.uint8)
    for c in range(n):
        line = cursor[0]
        idx = next_ints(f"column {c + 1}")
        nz = [i for i in idx if i != 0]
        if len(nz) != col_w[c] or any(i != 0 for i in idx[len(nz):]):
            raise fail(f"column {c + 1} does not list {col_w[c]} row indices", line)
        if any(not 1 <= i <= m for i in nz) or len(set(nz)) != len(nz):
            raise fail(f"column {c + 1} has an invalid or repeated row index", line)
        dense[np.array(nz, dtype=int) - 1, c] = 1
    for r in range(m):
        line = cursor[0]
        idx = next_ints(f"row {r + 1}")
        nz = [i for i in idx if i != 0]
        if len(nz) != row_w[r] or any(i != 0 for i in idx[len(nz):]):
            raise fail(f"row {r + 1} does not list {row_w[r]} column indices", line)
        if sorted(nz) != (np.flatnonzero(dense[r]) + 1).tolist():
            raise fail(f"row {r + 1} disagrees with the column lists", line)
    if any(ln.strip() for ln in lines[cursor[0]:]):
        raise fail("trailing data after the row lists", cursor[0])
    return BitMatrix.from_dense(dense) if m else BitMatrix.zeros(0, n)


def import_alist(path: str | os.PathLike) -> BitMatrix:
    return parse_alist(Path(path).read_text(encoding="utf-8"))


def export_alist(m: BitMatrix, path: str | os.PathLike) -> None:
    write_text_atomic(path, to_alist(m))


# -- MatrixMarket -----------------------------------------------------------


def to_matrixmarket(m: BitMatrix, comment: str = "") -> str:
    rows, cols = np.nonzero(m.to_dense())
    out = ["%%MatrixMarket matrix coordinate integer general"]
    out += [f"% {line}" for line in comment.splitlines()]
    out.append(f"{m.rows} {m.cols} {rows.size}")
    out += [f"{r + 1} {c + 1} 1" for r, c in zip(rows, cols)]
    return "\n".join(out) + "\n"


def export_matrixmarket(m: BitMatrix, path: str | os.PathLike, comment: str = "") -> None:
    write_text_atomic(path, to_matrixmarket(m, comment))


def import_matrixmarket(path: str | os.PathLike) -> BitMatrix:
    text = Path(path).read_text(encoding="utf-8")
    offset = 0
    size = None
    dense = None
    for line in text.split("\n"):
        here = offset
        offset += len(line.encode()) + 1
        s = line.strip()
        if not s or s.startswith("%"):
            if here == 0 and "coordinate" not in s:
                raise FormatError("only coordinate MatrixMarket files are supported at byte 0")
            continue
        try:
            nums = [int(t) for t in s.split()]
        except ValueError:
            raise FormatError(f"non-integer token at byte {here}") from None
        if size is None:
            if len(nums) != 3:
                raise FormatError(f"size line must be 'rows cols nnz' at byte {here}")
            size = nums
            dense = np.zeros(nums[:2], dtype=np.uint8)
            continue
        if len(nums) != 3 or not (1 <= nums[0] <= size[0] and 1 <= nums[1] <= size[1]):
            raise FormatError(f"bad entry at byte {here}")
        dense[nums[0] - 1, nums[1] - 1] ^= nums[2] & 1
    if size is None:
        raise FormatError(f"missing size line at byte {offset}")
    return BitMatrix.from_dense(dense) if size[0] else BitMatrix.zeros(0, size[1])


def import_matrix(path: str | os.PathLike) -> BitMatrix:
    """Dispatch on extension: ``.mtx`` is MatrixMarket, anything else alist."""
    return import_matrixmarket(path) if str(path).endswith(".mtx") else import_alist(path)


# -- JSON spec and config files ---------------------------------------------


def read_json(path: str | os.PathLike):
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def read_spec(path: str | os.PathLike) -> CodeSpec:
    obj = read_json(path)
    try:
        return CodeSpec.from_dict(obj)
    except SpecError as exc:
        raise SpecError(f"{path}: {exc}") from None


def dump_spec(spec: CodeSpec) -> str:
    return json.dumps(spec.to_dict(), indent=2) + "\n"


def write_spec(spec: CodeSpec, path: str | os.PathLike) -> None:
    write_text_atomic(path, dump_spec(spec))


def spec_hash(spec: CodeSpec) -> str:
    body = spec.to_dict()
    body.pop("comment", None)
    return hashlib.sha256(json.dumps(body, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def write_code(code: CssCode, prefix: str, spec: CodeSpec | None = None, fmt: str = "alist") -> list[str]:
    """Write Hx, Hz and a metadata sidecar; returns the paths written."""
    if fmt not in ("alist", "mtx"):
        raise ValueError(f"unknown matrix format {fmt!r}")
    paths = []
    for name, m in (("hx", code.Hx), ("hz", code.Hz)):
        path = f"{prefix}.{name}.{fmt}"
        if fmt == "alist":
            export_alist(m, path)
        else:
            export_matrixmarket(m, path, comment=QUBIT_INDEX_CONVENTION)
        paths.append(path)
    meta = {
        "n": code.n,
        "n_A": code.n_a,
        "n_B": code.n_b,
        "group_order": code.group_order,
        "hx_shape": list(code.Hx.shape),
        "hz_shape": list(code.Hz.shape),
        "qubit_index": QUBIT_INDEX_CONVENTION,
        "spec_hash": spec_hash(spec) if spec is not None else None,
        "spec": spec.to_dict() if spec is not None else None,
    }
    meta_path = f"{prefix}.meta.json"
    write_text_atomic(meta_path, json.dumps(meta, indent=2) + "\n")
    paths.append(meta_path)
    return paths
