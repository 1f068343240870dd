"""Short local codes, their permutation orbits, and intersection-code data."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .gf2 import (
    BitMatrix,
    apply_column_permutation,
    intersect_row_spaces,
    kernel_basis,
    multiply,
    rank,
    rref,
    transpose,
)

__all__ = [
    "FAMILIES",
    "INF",
    "IntersectionData",
    "LocalCode",
    "canonical",
    "code_distance",
    "distinct_permuted_codes",
    "generator_weight_bound",
    "intersection_data",
    "min_distance",
]

INF = math.inf

_CANONICAL = {
    "rep2": (["11"], ["11"]),
    "ham6": (
        ["100011", "010101", "001110"],
        ["011100", "101010", "110001"],
    ),
    "ham8": (
        ["10000111", "01001011", "00101101", "00011110"],
        ["01111000", "10110100", "11010010", "11100001"],
    ),
}
FAMILIES = tuple(_CANONICAL)


@dataclass(frozen=True)
class LocalCode:
    """C = ker H with generator matrix G (rows span C).

    ``perm`` records the column permutation applied to the canonical form of
    ``family``; custom codes carry the identity.
    """

    H: BitMatrix
    G: BitMatrix
    family: str = "custom"
    perm: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.H.cols != self.G.cols:
            raise ValueError(f"H has {self.H.cols} columns but G has {self.G.cols}")
        if self.perm is None:
            object.__setattr__(self, "perm", tuple(range(self.H.cols)))

    @property
    def n(self) -> int:
        return self.H.cols

    @property
    def k(self) -> int:
        return rank(self.G)

    def problems(self) -> list[str]:
        """Names of violated local-code invariants (empty when valid)."""
        out = []
        if not multiply(self.H, transpose(self.G)).is_zero():
            out.append("H*G^T != 0")
        elif rank(self.H) + rank(self.G) != self.n:
            out.append("rowspace(G) != ker(H)")
        return out

    def validate(self) -> "LocalCode":
        issues = self.problems()
        if issues:
            raise ValueError(f"invalid local code ({self.family}): " + "; ".join(issues))
        return self

    def permuted(self, perm: Sequence[int]) -> "LocalCode":
        """Move column c to position perm[c]; composes with any existing permutation."""
        perm = tuple(int(p) for p in perm)
        total = tuple(perm[p] for p in self.perm)
        return LocalCode(
            apply_column_permutation(self.H, perm),
            apply_column_permutation(self.G, perm),
            self.family,
            total,
        )

    def same_code(self, other: "LocalCode") -> bool:
        return self.n == other.n and rref(self.G)[0] == rref(other.G)[0]


def canonical(family: str) -> LocalCode:
    try:
        h_rows, g_rows = _CANONICAL[family]
    except KeyError:
        raise ValueError(f"unknown local code family {family!r}; expected one of {FAMILIES}") from None
    return LocalCode(BitMatrix.from_strings(h_rows), BitMatrix.from_strings(g_rows), family)


def _rref_key(rows: list[int], n: int) -> tuple[int, ...]:
    """RREF (lowest column first) of int-bitset rows, as sorted-by-pivot tuple."""
    rows = list(rows)
    out: list[int] = []
    for c in range(n):
        bit = 1 << c
        p = next((i for i, r in enumerate(rows) if r & bit), None)
        if p is None:
            continue
        piv = rows.pop(p)
        rows = [r ^ piv if r & bit else r for r in rows]
        out = [r ^ piv if r & bit else r for r in out]
        out.append(piv)
    return tuple(out)


def _bits(row: int, n: int) -> tuple[int, ...]:
    return tuple((row >> c) & 1 for c in range(n))


@lru_cache(maxsize=None)
def distinct_permuted_codes(family: str) -> tuple[LocalCode, ...]:
    """Distinct codes reachable from the canonical one by a column permutation.

    One representative permutation per code (the first in lexicographic
    permutation order), sorted by the RREF of G read row by row.
    """
    base = canonical(family)
    if family == "rep2":
        return (base,)
    n = base.n
    g_rows = [sum(int(b) << c for c, b in enumerate(row)) for row in base.G.to_dense()]
    seen: dict[tuple[int, ...], tuple[int, ...]] = {}
    for perm in itertools.permutations(range(n)):
        moved = []
        for r in g_rows:
            v = 0
            for c in range(n):
                if (r >> c) & 1:
                    v |= 1 << perm[c]
            moved.append(v)
        key = _rref_key(moved, n)
        if key not in seen:
            seen[key] = perm
    ordered = sorted(seen, key=lambda k: [_bits(r, n) for r in k])
    return tuple(base.permuted(seen[k]) for k in ordered)


def min_distance(basis: BitMatrix) -> float:
    """Minimum nonzero weight in rowspace(basis) by enumeration; INF for {0}."""
    reduced, pivots = rref(basis)
    k = len(pivots)
    if k == 0:
        return INF
    if k > 24:
        raise ValueError(f"refusing to enumerate 2^{k} codewords")
    codewords = np.zeros((1, reduced.data.shape[1]), dtype=np.uint64)
    for row in reduced.data:
        codewords = np.concatenate([codewords, codewords ^ row])
    weights = np.bitwise_count(codewords[1:]).sum(axis=1)
    return int(weights.min())


def code_distance(code: LocalCode) -> float:
    return min_distance(code.G)


def dual_distance(code: LocalCode) -> float:
    return min_distance(code.H)


@dataclass(frozen=True)
class IntersectionData:
    """Dimensions and distances of C0 ∩ C1 and C0^⊥ ∩ C1^⊥ (not the dual of C0 ∩ C1)."""

    n: int
    k0: int
    k1: int
    k01: int
    k01_perp: int
    d01: float
    d01_perp: float
    basis01: BitMatrix
    basis01_perp: BitMatrix


def intersection_data(c0: LocalCode, c1: LocalCode) -> IntersectionData:
    if c0.n != c1.n:
        raise ValueError(f"local codes have different lengths: {c0.n} != {c1.n}")
    b01 = intersect_row_spaces(c0.G, c1.G)
    b01p = intersect_row_spaces(c0.H, c1.H)
    return IntersectionData(
        n=c0.n,
        k0=rank(c0.G),
        k1=rank(c1.G),
        k01=b01.rows,
        k01_perp=b01p.rows,
        d01=min_distance(b01),
        d01_perp=min_distance(b01p),
        basis01=b01,
        basis01_perp=b01p,
    )


def generator_weight_bound(c0: LocalCode, c1: LocalCode, c0p: LocalCode, c1p: LocalCode) -> float:
    """Lower bound on stabilizer weight from products of local distances."""
    d, dp = code_distance, dual_distance
    return max(dp(c0) * d(c0p), dp(c1) * d(c1p), d(c0) * dp(c1p), d(c1) * dp(c0p))


def random_local_code(n: int, rng: np.random.Generator, k: int | None = None) -> LocalCode:
    """Random [n, k] code (k uniform in 0..n when not given), H from ker G."""
    if k is None:
        k = int(rng.integers(0, n + 1))
    while True:
        g = BitMatrix.from_dense(rng.integers(0, 2, size=(k, n))) if k else BitMatrix.zeros(0, n)
        if rank(g) == k:
            break
    return LocalCode(kernel_basis(g), g)
