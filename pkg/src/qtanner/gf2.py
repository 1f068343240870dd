"""Dense GF(2) linear algebra on word-packed bit matrices.

Rows are packed into little-endian 64-bit words: column ``c`` lives in word
``c // 64`` at bit ``c % 64``. Bits past ``cols`` in the last word are always
zero, so two matrices are equal iff their shapes and packed words are equal.

Every function here is pure. A :class:`BitMatrix` is immutable once built and
caches its own reduced row-echelon form, which makes repeated row-space
membership queries cheap.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

WORD = 64

__all__ = [
    "BitMatrix",
    "WORD",
    "apply_column_permutation",
    "as_bitvector",
    "intersect_row_spaces",
    "kernel_basis",
    "kron",
    "multiply",
    "rank",
    "row_space_contains",
    "rref",
    "stack_vertical",
    "transpose",
    "weight",
]


def _n_words(cols: int) -> int:
    return (cols + WORD - 1) // WORD


def pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into an (rows, words) uint64 array."""
    dense = np.asarray(dense)
    rows, cols = dense.shape
    words = _n_words(cols)
    if rows == 0 or words == 0:
        return np.zeros((rows, words), dtype=np.uint64)
    packed = np.packbits(dense.astype(np.uint8, copy=False) & 1, axis=1, bitorder="little")
    pad = words * 8 - packed.shape[1]
    if pad:
        packed = np.pad(packed, ((0, 0), (0, pad)))
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def unpack_rows(data: np.ndarray, cols: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`; returns a uint8 array of shape (rows, cols)."""
    rows = data.shape[0]
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(data.astype("<u8")).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, count=cols, bitorder="little")


class BitMatrix:
    """Immutable dense matrix over GF(2) with word-packed rows."""

    __slots__ = ("rows", "cols", "data", "_rref")

    def __init__(self, data: np.ndarray, cols: int):
        data = np.asarray(data, dtype=np.uint64)
        if data.ndim != 2 or data.shape[1] != _n_words(cols):
            raise ValueError(f"packed data of shape {data.shape} does not fit {cols} columns")
        tail = cols % WORD
        if tail and data.shape[0] and np.any(data[:, -1] >> np.uint64(tail)):
            raise ValueError("nonzero bits beyond the last column")
        data = data.copy()
        data.flags.writeable = False
        self.rows = int(data.shape[0])
        self.cols = int(cols)
        self.data = data
        self._rref = None

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        arr = np.asarray(dense)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls(pack_rows(arr % 2), arr.shape[1])

    @classmethod
    def from_strings(cls, rows: Sequence[str], cols: int | None = None) -> "BitMatrix":
        """Build from rows such as ``"100011"``; whitespace is ignored."""
        cleaned = ["".join(r.split()) for r in rows]
        if cols is None:
            if not cleaned:
                raise ValueError("cols is required for an empty row list")
            cols = len(cleaned[0])
        dense = np.zeros((len(cleaned), cols), dtype=np.uint8)
        for i, r in enumerate(cleaned):
            if len(r) != cols or set(r) - {"0", "1"}:
                raise ValueError(f"row {i} is not a {cols}-character bit string: {r!r}")
            dense[i] = [ch == "1" for ch in r]
        return cls.from_dense(dense) if len(cleaned) else cls.zeros(0, cols)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, _n_words(cols)), dtype=np.uint64), cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8)) if n else cls.zeros(0, 0)

    # -- views ----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.data, self.cols)

    def to_strings(self) -> list[str]:
        return ["".join("1" if b else "0" for b in row) for row in self.to_dense()]

    def row(self, i: int) -> np.ndarray:
        return unpack_rows(self.data[i : i + 1], self.cols)[0]

    def row_weights(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros(0, dtype=np.int64)
        return np.bitwise_count(self.data).sum(axis=1, dtype=np.int64)

    def is_zero(self) -> bool:
        return not self.data.any()

    @property
    def T(self) -> "BitMatrix":
        return transpose(self)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data.tobytes()))

    def __repr__(self) -> str:
        if self.rows * self.cols <= 256:
            body = ", ".join(self.to_strings())
            return f"BitMatrix({self.rows}x{self.cols}: [{body}])"
        return f"BitMatrix({self.rows}x{self.cols})"


def as_bitvector(v, n: int | None = None) -> np.ndarray:
    """Coerce a bit vector (sequence, array or bit string) to a uint8 0/1 array."""
    if isinstance(v, str):
        arr = np.array([ch == "1" for ch in "".join(v.split())], dtype=np.uint8)
    else:
        arr = np.asarray(v).astype(np.uint8).ravel() & 1
    if n is not None and arr.size != n:
        raise ValueError(f"vector has length {arr.size}, expected {n}")
    return arr


def weight(v) -> int:
    return int(np.count_nonzero(as_bitvector(v)))


# -- elimination core -------------------------------------------------------


def _eliminate(data: np.ndarray, cols: int) -> tuple[np.ndarray, list[int]]:
    """Reduce a packed copy in place to RREF; returns (nonzero rows, pivots)."""
    nrows = data.shape[0]
    pivots: list[int] = []
    r = 0
    one = np.uint64(1)
    for c in range(cols):
        if r == nrows:
            break
        w, b = divmod(c, WORD)
        column = (data[:, w] >> np.uint64(b)) & one
        below = np.flatnonzero(column[r:])
        if below.size == 0:
            continue
        p = r + int(below[0])
        if p != r:
            data[[r, p]] = data[[p, r]]
            column[r], column[p] = column[p], column[r]
        column[r] = 0
        hits = np.flatnonzero(column)
        if hits.size:
            data[hits] ^= data[r]
        pivots.append(c)
        r += 1
    return data[:r], pivots


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row-echelon form with zero rows dropped, and its pivot columns.

    Pivots are chosen leftmost column first, topmost available row first.
    """
    if m._rref is None:
        reduced, pivots = _eliminate(np.array(m.data, copy=True), m.cols)
        m._rref = (BitMatrix(reduced, m.cols), tuple(pivots))
    reduced, pivots = m._rref
    return reduced, list(pivots)


def rank(m: BitMatrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Canonical basis of {v : m v^T = 0}, one row per free column (ascending)."""
    reduced, pivots = rref(m)
    free = np.setdiff1d(np.arange(m.cols), np.asarray(pivots, dtype=np.int64))
    basis = np.zeros((free.size, m.cols), dtype=np.uint8)
    if free.size:
        basis[np.arange(free.size), free] = 1
        if pivots:
            basis[:, pivots] = reduced.to_dense()[:, free].T
    return BitMatrix.from_dense(basis) if free.size else BitMatrix.zeros(0, m.cols)


def row_space_contains(m: BitMatrix, v) -> bool:
    vec = as_bitvector(v)
    if vec.size != m.cols:
        raise ValueError(f"vector length {vec.size} does not match {m.cols} columns")
    reduced, pivots = rref(m)
    target = pack_rows(vec.reshape(1, -1))[0] if m.cols else np.zeros(0, np.uint64)
    if not pivots:
        return not target.any()
    coeffs = vec[pivots].astype(bool)
    if not coeffs.any():
        return not target.any()
    combo = np.bitwise_xor.reduce(reduced.data[coeffs], axis=0)
    return bool(np.array_equal(combo, target))


def transpose(m: BitMatrix) -> BitMatrix:
    if m.rows == 0 or m.cols == 0:
        return BitMatrix.zeros(m.cols, m.rows)
    return BitMatrix.from_dense(m.to_dense().T)


def multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.rows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    if a.rows == 0 or b.cols == 0:
        return BitMatrix.zeros(a.rows, b.cols)
    if a.cols == 0:
        return BitMatrix.zeros(a.rows, b.cols)
    # float64 BLAS is exact for inner dimensions far beyond anything used here
    prod = a.to_dense().astype(np.float64) @ b.to_dense().astype(np.float64)
    return BitMatrix.from_dense(prod.astype(np.int64) & 1)


def stack_vertical(mats: Iterable[BitMatrix]) -> BitMatrix:
    mats = list(mats)
    if not mats:
        raise ValueError("nothing to stack")
    cols = mats[0].cols
    for m in mats:
        if m.cols != cols:
            raise ValueError(f"column mismatch while stacking: {m.cols} != {cols}")
    return BitMatrix(np.concatenate([m.data for m in mats], axis=0), cols)


def kron(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Kronecker product; column ``i * b.cols + j`` pairs column i of a with j of b."""
    rows, cols = a.rows * b.rows, a.cols * b.cols
    if rows == 0 or cols == 0:
        return BitMatrix.zeros(rows, cols)
    return BitMatrix.from_dense(np.kron(a.to_dense(), b.to_dense()))


def apply_column_permutation(m: BitMatrix, perm: Sequence[int]) -> BitMatrix:
    """Move column c to position perm[c]."""
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (m.cols,) or not np.array_equal(np.sort(perm), np.arange(m.cols)):
        raise ValueError(f"not a permutation of {m.cols} columns")
    if m.rows == 0:
        return m
    out = np.empty((m.rows, m.cols), dtype=np.uint8)
    out[:, perm] = m.to_dense()
    return BitMatrix.from_dense(out)


def intersect_row_spaces(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """RREF basis of rowspace(a) ∩ rowspace(b), via (ker a + ker b)^⊥."""
    if a.cols != b.cols:
        raise ValueError(f"column mismatch: {a.cols} != {b.cols}")
    duals = stack_vertical([kernel_basis(a), kernel_basis(b)])
    return rref(kernel_basis(duals))[0]
