"""Logical operators: the row/column symplectic basis of the base code,
replicated base logicals in odd-order lifts, and slice-codeword embeddings."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .construction import CodeSpec, CssCode, build_base, build_lifted, dimension, slice_check_matrices
from .errors import PreconditionError
from .gf2 import BitMatrix, as_bitvector, row_space_contains, rref
from .local_codes import LocalCode, intersection_data

__all__ = [
    "LogicalBasis",
    "base_logical_basis",
    "in_kernel",
    "is_nontrivial_logical",
    "pairing_matrix",
    "replicate_base_logicals",
    "slice_logical",
]


@dataclass(frozen=True)
class LogicalBasis:
    """Paired X/Z logicals; ``meta[s]`` is (family, p, q) for pair s.

    family ``"intersection"`` pairs come from C01 ⊗ C01' pivots, ``"perp"``
    pairs from C01^⊥ ⊗ C01'^⊥ pivots, ``"replicated"`` from a lift.
    """

    x_ops: list[np.ndarray]
    z_ops: list[np.ndarray]
    meta: list[tuple[str, int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.x_ops)

    def pairing(self) -> np.ndarray:
        return pairing_matrix(self.x_ops, self.z_ops)


def pairing_matrix(x_ops, z_ops) -> np.ndarray:
    if not len(x_ops) or not len(z_ops):
        return np.zeros((len(x_ops), len(z_ops)), dtype=np.uint8)
    x = np.asarray(x_ops, dtype=np.int64)
    z = np.asarray(z_ops, dtype=np.int64)
    return ((x @ z.T) & 1).astype(np.uint8)


def _pivot_rows(basis: BitMatrix) -> tuple[np.ndarray, list[int]]:
    reduced, pivots = rref(basis)
    return reduced.to_dense(), pivots


def _unit(n: int, i: int) -> np.ndarray:
    e = np.zeros(n, dtype=np.uint8)
    e[i] = 1
    return e


def base_logical_basis(c0: LocalCode, c1: LocalCode, c0p: LocalCode, c1p: LocalCode) -> LogicalBasis:
    """Symplectic basis whose operators each live on one row or one column of the grid."""
    a, b = intersection_data(c0, c1), intersection_data(c0p, c1p)
    n_a, n_b = a.n, b.n
    u, i_piv = _pivot_rows(a.basis01)
    v, j_piv = _pivot_rows(b.basis01)
    u_perp, i_perp = _pivot_rows(a.basis01_perp)
    v_perp, j_perp = _pivot_rows(b.basis01_perp)

    xs, zs, meta = [], [], []
    for p in range(len(i_piv)):
        for q in range(len(j_piv)):
            xs.append(np.kron(_unit(n_a, i_piv[p]), v[q]))
            zs.append(np.kron(u[p], _unit(n_b, j_piv[q])))
            meta.append(("intersection", p, q))
    for r in range(len(i_perp)):
        for s in range(len(j_perp)):
            xs.append(np.kron(u_perp[r], _unit(n_b, j_perp[s])))
            zs.append(np.kron(_unit(n_a, i_perp[r]), v_perp[s]))
            meta.append(("perp", r, s))
    return LogicalBasis(xs, zs, meta)


def in_kernel(m: BitMatrix, v) -> bool:
    vec = as_bitvector(v, m.cols).astype(np.int64)
    if m.rows == 0:
        return True
    return not ((m.to_dense().astype(np.int64) @ vec) & 1).any()


def is_nontrivial_logical(code: CssCode, v, side: str) -> bool:
    """Z side: v in ker(Hx) but not in rowspace(Hz); X side symmetric."""
    vec = as_bitvector(v)
    if vec.size != code.n:
        raise ValueError(f"vector has length {vec.size}, code has n = {code.n}")
    side = side.upper()
    if side == "Z":
        checks, stabs = code.Hx, code.Hz
    elif side == "X":
        checks, stabs = code.Hz, code.Hx
    else:
        raise ValueError(f"side must be 'X' or 'Z', got {side!r}")
    return in_kernel(checks, vec) and not row_space_contains(stabs, vec)


def replicate_base_logicals(
    base_basis: LogicalBasis, spec: CodeSpec, lifted: CssCode | None = None
) -> LogicalBasis:
    """Copy each base logical onto every fiber of an odd-order lift.

    Requires the lifted and base dimensions to agree; the returned operators
    are certified by kernel membership and an identity pairing matrix.
    """
    order = spec.group.order
    if order % 2 == 0:
        raise PreconditionError(f"replication needs an odd group order, got {order}")
    if lifted is None:
        lifted = build_lifted(spec)
    base = build_base(*spec.local_codes())
    if dimension(lifted) != dimension(base):
        raise PreconditionError("lifted and base dimensions differ")
    xs = [np.repeat(x, order) for x in base_basis.x_ops]
    zs = [np.repeat(z, order) for z in base_basis.z_ops]
    if not all(in_kernel(lifted.Hz, x) for x in xs) or not all(in_kernel(lifted.Hx, z) for z in zs):
        raise AssertionError("replicated logical left the kernel")
    if not np.array_equal(pairing_matrix(xs, zs), np.eye(len(xs), dtype=np.uint8)):
        raise AssertionError("replicated logicals are not symplectically paired")
    meta = [("replicated", s, 0) for s in range(len(xs))]
    return LogicalBasis(xs, zs, meta)


def slice_logical(spec: CodeSpec, side: str, slice_index: int, codeword, kind: str | None = None) -> np.ndarray:
    """Embed a slice Tanner codeword into the lifted code.

    ``side="A"`` places it on column ``j* = slice_index`` (Z type by default),
    ``side="B"`` on row ``i* = slice_index`` (X type by default). The result
    lies in the matching kernel of the lifted code but may be a stabilizer.
    """
    side = side.upper()
    kind = (kind or ("Z" if side == "A" else "X")).upper()
    h_a, g_a, g_b, h_b = slice_check_matrices(spec)
    order = spec.group.order
    if side == "A":
        check = h_a if kind == "Z" else g_a
        limit = spec.n_b
    elif side == "B":
        check = g_b if kind == "Z" else h_b
        limit = spec.n_a
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    if kind not in ("X", "Z"):
        raise ValueError(f"kind must be 'X' or 'Z', got {kind!r}")
    if not 0 <= slice_index < limit:
        raise ValueError(f"slice index {slice_index} out of range")
    word = as_bitvector(codeword, check.cols)
    if not in_kernel(check, word):
        raise ValueError("codeword is not in the slice code")
    out = np.zeros((spec.n_a, spec.n_b, order), dtype=np.uint8)
    if side == "A":
        out[:, slice_index, :] = word.reshape(spec.n_a, order)
    else:
        out[slice_index, :, :] = word.reshape(spec.n_b, order)
    return out.ravel()
