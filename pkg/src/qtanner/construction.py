"""Base and lifted quantum Tanner codes.

Qubits of the base code sit on an ``n_A x n_B`` grid, column ``i * n_B + j``.
The lift replaces each base qubit by a fiber indexed by group elements, and
qubit ``(i, j, g)`` becomes column ``(i * n_B + j) * |G| + g``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import IntegrityError, PreconditionError, SpecError
from .gf2 import BitMatrix, kron, multiply, rank, stack_vertical, transpose
from .groups import FiniteGroup, is_right_transitive, parse_group
from .local_codes import (
    INF,
    LocalCode,
    canonical,
    distinct_permuted_codes,
    intersection_data,
)

__all__ = [
    "CodeSpec",
    "CssCode",
    "base_distance_by_side",
    "base_params_lemma",
    "build_base",
    "build_lifted",
    "css_violation",
    "dimension",
    "lifted_dimension",
    "lemma_distance_literal",
    "local_code_from_dict",
    "local_code_to_dict",
    "make_spec",
    "slice_check_matrices",
    "theorem1_dimension",
    "theorem1_eligible",
]

QUBIT_INDEX_CONVENTION = "column = ((i * n_B) + j) * |G| + g; i in [n_A], j in [n_B], g in group"


@dataclass(frozen=True)
class CssCode:
    Hx: BitMatrix
    Hz: BitMatrix
    n_a: int
    n_b: int
    group_order: int = 1
    provenance: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.Hx.cols != self.Hz.cols:
            raise SpecError(f"Hx has {self.Hx.cols} columns but Hz has {self.Hz.cols}")
        if self.n_a * self.n_b * self.group_order != self.Hx.cols:
            raise SpecError("grid shape does not match the number of columns")

    @property
    def n(self) -> int:
        return self.Hx.cols

    def qubit_index(self, i: int, j: int, g: int = 0) -> int:
        return (i * self.n_b + j) * self.group_order + g

    def qubit_coords(self, column: int) -> tuple[int, int, int]:
        cell, g = divmod(column, self.group_order)
        i, j = divmod(cell, self.n_b)
        return i, j, g

    @classmethod
    def from_matrices(cls, hx: BitMatrix, hz: BitMatrix, provenance=None) -> "CssCode":
        """Wrap an arbitrary pair of check matrices (grid metadata is 1 x n)."""
        return cls(hx, hz, 1, hx.cols, 1, provenance)


def local_code_to_dict(code: LocalCode) -> dict:
    if code.family == "custom":
        return {"family": "custom", "H": code.H.to_strings(), "G": code.G.to_strings(), "n": code.n}
    return {"family": code.family, "perm": list(code.perm)}


def local_code_from_dict(obj) -> LocalCode:
    """Accepts ``"ham6"``, ``{"family", "perm"}``, ``{"family", "index"}`` or custom H/G."""
    if isinstance(obj, str):
        obj = {"family": obj}
    if not isinstance(obj, dict) or "family" not in obj:
        raise SpecError(f"local code must be a family name or an object with 'family': {obj!r}")
    family = obj["family"]
    if family == "custom":
        try:
            n = obj.get("n")
            h = BitMatrix.from_strings(obj["H"], n if not obj["H"] else None)
            g = BitMatrix.from_strings(obj["G"], n if not obj["G"] else None)
            return LocalCode(h, g, "custom")
        except (KeyError, ValueError) as exc:
            raise SpecError(f"bad custom local code: {exc}") from None
    try:
        base = canonical(family)
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    if "index" in obj:
        codes = distinct_permuted_codes(family)
        idx = obj["index"]
        if not isinstance(idx, int) or not 0 <= idx < len(codes):
            raise SpecError(f"local code index {idx!r} out of range for {family}")
        return codes[idx]
    perm = obj.get("perm")
    if perm is None:
        return base
    try:
        return base.permuted(perm)
    except ValueError as exc:
        raise SpecError(f"bad permutation for {family}: {exc}") from None


@dataclass(frozen=True)
class CodeSpec:
    """Group, ordered multisets A and B (element indices) and the four local codes."""

    group: FiniteGroup
    A: tuple[int, ...]
    B: tuple[int, ...]
    c0: LocalCode
    c1: LocalCode
    c0p: LocalCode
    c1p: LocalCode
    comment: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(int(a) for a in self.A))
        object.__setattr__(self, "B", tuple(int(b) for b in self.B))
        problems = self.problems()
        if problems:
            raise SpecError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if len(self.A) != self.c0.n or len(self.A) != self.c1.n:
            out.append(f"|A| = {len(self.A)} must equal the length of c0 ({self.c0.n}) and c1 ({self.c1.n})")
        if len(self.B) != self.c0p.n or len(self.B) != self.c1p.n:
            out.append(f"|B| = {len(self.B)} must equal the length of c0p ({self.c0p.n}) and c1p ({self.c1p.n})")
        for name, elems in (("A", self.A), ("B", self.B)):
            bad = [x for x in elems if not 0 <= x < self.group.order]
            if bad:
                out.append(f"{name} contains elements outside the group: {bad}")
        return out

    @property
    def n_a(self) -> int:
        return len(self.A)

    @property
    def n_b(self) -> int:
        return len(self.B)

    @property
    def n(self) -> int:
        return self.n_a * self.n_b * self.group.order

    def local_codes(self) -> tuple[LocalCode, LocalCode, LocalCode, LocalCode]:
        return self.c0, self.c1, self.c0p, self.c1p

    def to_dict(self) -> dict:
        labels = self.group.labels
        out = {
            "group": self.group.descriptor,
            "A": [labels[a] for a in self.A],
            "B": [labels[b] for b in self.B],
            "local_codes": {
                "c0": local_code_to_dict(self.c0),
                "c1": local_code_to_dict(self.c1),
                "c0p": local_code_to_dict(self.c0p),
                "c1p": local_code_to_dict(self.c1p),
            },
        }
        if self.comment:
            out["comment"] = self.comment
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "CodeSpec":
        if not isinstance(obj, dict):
            raise SpecError("spec must be a mapping")
        missing = [k for k in ("group", "A", "B", "local_codes") if k not in obj]
        if missing:
            raise SpecError(f"spec is missing key(s): {', '.join(missing)}")
        unknown = set(obj) - {"group", "A", "B", "local_codes", "comment"}
        if unknown:
            raise SpecError(f"unknown spec key(s): {', '.join(sorted(unknown))}")
        try:
            group = parse_group(obj["group"])
        except ValueError as exc:
            raise SpecError(f"key 'group': {exc}") from None
        elems = {}
        for key in ("A", "B"):
            if not isinstance(obj[key], list):
                raise SpecError(f"key {key!r} must be a list of element labels")
            try:
                elems[key] = tuple(group.index(x) for x in obj[key])
            except ValueError as exc:
                raise SpecError(f"key {key!r}: {exc}") from None
        lc = obj["local_codes"]
        if not isinstance(lc, dict):
            raise SpecError("key 'local_codes' must be a mapping with c0, c1, c0p, c1p")
        codes = {}
        for key in ("c0", "c1", "c0p", "c1p"):
            if key not in lc:
                raise SpecError(f"key 'local_codes.{key}' is missing")
            try:
                codes[key] = local_code_from_dict(lc[key])
            except SpecError as exc:
                raise SpecError(f"key 'local_codes.{key}': {exc}") from None
        return cls(group, elems["A"], elems["B"], comment=str(obj.get("comment", "")), **codes)

    def key(self) -> str:
        """Stable content hash of the spec (comment excluded)."""
        body = self.to_dict()
        body.pop("comment", None)
        text = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


# -- base code --------------------------------------------------------------


def _check_lengths(c0: LocalCode, c1: LocalCode, c0p: LocalCode, c1p: LocalCode) -> None:
    if c0.n != c1.n:
        raise SpecError(f"A-side local codes differ in length: {c0.n} != {c1.n}")
    if c0p.n != c1p.n:
        raise SpecError(f"B-side local codes differ in length: {c0p.n} != {c1p.n}")


def build_base(c0: LocalCode, c1: LocalCode, c0p: LocalCode, c1p: LocalCode) -> CssCode:
    _check_lengths(c0, c1, c0p, c1p)
    hx = stack_vertical([kron(c0.H, c0p.G), kron(c1.H, c1p.G)])
    hz = stack_vertical([kron(c0.G, c1p.H), kron(c1.G, c0p.H)])
    return CssCode(hx, hz, c0.n, c0p.n, 1, ("base", c0, c1, c0p, c1p))


def base_params_lemma(c0: LocalCode, c1: LocalCode, c0p: LocalCode, c1p: LocalCode) -> tuple[int, float]:
    """Closed-form (k, d) of the base code from the intersection codes.

    ``d`` is INF when k = 0. Logical families with no members do not
    constrain the distance.
    """
    _check_lengths(c0, c1, c0p, c1p)
    a, b = intersection_data(c0, c1), intersection_data(c0p, c1p)
    k = a.k01 * b.k01 + a.k01_perp * b.k01_perp
    d_x, d_z = base_distance_by_side(c0, c1, c0p, c1p)
    return k, min(d_x, d_z)


def base_distance_by_side(c0, c1, c0p, c1p) -> tuple[float, float]:
    """(d_X, d_Z) of the base code from the intersection codes."""
    a, b = intersection_data(c0, c1), intersection_data(c0p, c1p)
    d_x = d_z = INF
    if a.k01 * b.k01:
        d_x, d_z = min(d_x, b.d01), min(d_z, a.d01)
    if a.k01_perp * b.k01_perp:
        d_x, d_z = min(d_x, a.d01_perp), min(d_z, b.d01_perp)
    return d_x, d_z


def lemma_distance_literal(c0, c1, c0p, c1p) -> float:
    """min(d01, d01', d01^⊥, d01'^⊥) over all four intersection codes."""
    a, b = intersection_data(c0, c1), intersection_data(c0p, c1p)
    return min(a.d01, b.d01, a.d01_perp, b.d01_perp)


# -- lifted code ------------------------------------------------------------


def _lift_block(m: BitMatrix, fiber_perms: np.ndarray, order: int) -> np.ndarray:
    """Dense (m ⊗ I) with the fiber of base column c permuted by fiber_perms[c]."""
    rows, cols = m.rows, m.cols
    out = np.zeros((rows * order, cols * order), dtype=np.uint8)
    if rows == 0:
        return out
    dense = m.to_dense().astype(bool)
    g = np.arange(order)
    for c in range(cols):
        hit = np.flatnonzero(dense[:, c])
        if hit.size == 0:
            continue
        r_idx = (hit[:, None] * order + g[None, :]).ravel()
        c_idx = np.broadcast_to(c * order + fiber_perms[c], (hit.size, order)).ravel()
        out[r_idx, c_idx] = 1
    return out


def _fiber_perms(spec: CodeSpec, mode: str) -> np.ndarray:
    """Per base column (i, j): g -> image under L_A, R_B or L_A R_B."""
    grp = spec.group
    perms = np.empty((spec.n_a * spec.n_b, grp.order), dtype=np.int64)
    ident = np.arange(grp.order)
    for i, a in enumerate(spec.A):
        for j, b in enumerate(spec.B):
            p = ident
            if mode in ("LA", "LARB"):
                p = grp.table[a, p]
            if mode in ("RB", "LARB"):
                p = grp.table[p, grp.inverse[b]]
            perms[i * spec.n_b + j] = p
    return perms


def build_lifted(spec: CodeSpec) -> CssCode:
    order = spec.group.order
    c0, c1, c0p, c1p = spec.local_codes()
    ident = np.broadcast_to(np.arange(order), (spec.n_a * spec.n_b, order))
    hx = np.concatenate(
        [
            _lift_block(kron(c0.H, c0p.G), ident, order),
            _lift_block(kron(c1.H, c1p.G), _fiber_perms(spec, "LARB"), order),
        ]
    )
    hz = np.concatenate(
        [
            _lift_block(kron(c0.G, c1p.H), _fiber_perms(spec, "RB"), order),
            _lift_block(kron(c1.G, c0p.H), _fiber_perms(spec, "LA"), order),
        ]
    )
    n = spec.n

    def pack(d):
        return BitMatrix.from_dense(d) if d.shape[0] else BitMatrix.zeros(0, n)

    return CssCode(pack(hx), pack(hz), spec.n_a, spec.n_b, order, spec)


def css_violation(code: CssCode) -> bool:
    return not multiply(code.Hx, transpose(code.Hz)).is_zero()


def dimension(code: CssCode) -> int:
    """k = n - rk(Hx) - rk(Hz), refusing codes whose checks do not commute."""
    if css_violation(code):
        raise IntegrityError("Hx * Hz^T != 0: not a valid CSS code")
    return code.n - rank(code.Hx) - rank(code.Hz)


def _is_rep2(code: LocalCode) -> bool:
    return code.n == 2 and code.same_code(canonical("rep2")) and not code.problems()


def theorem1_eligible(spec: CodeSpec) -> bool:
    if spec.n_b != 2 or not (_is_rep2(spec.c0p) and _is_rep2(spec.c1p)):
        return False
    grp = spec.group
    step = grp.mul(grp.inv(spec.B[0]), spec.B[1])
    return is_right_transitive(grp, step)


def theorem1_dimension(spec: CodeSpec) -> int:
    """k01 + k01^⊥ for n_B = 2, repetition B-side and a transitive b1^-1 b2."""
    if not theorem1_eligible(spec):
        raise PreconditionError(
            "closed-form lifted dimension needs n_B = 2, repetition codes on the B side "
            "and right multiplication by b1^-1 b2 acting as a single cycle"
        )
    a = intersection_data(spec.c0, spec.c1)
    return a.k01 + a.k01_perp


def lifted_dimension(spec: CodeSpec, code: CssCode | None = None, audit: bool = False) -> tuple[int, bool]:
    """(k, fast_path_used). With ``audit`` the closed form is re-checked by ranks."""
    if theorem1_eligible(spec):
        k = theorem1_dimension(spec)
        if audit:
            exact = dimension(code if code is not None else build_lifted(spec))
            if exact != k:
                raise IntegrityError(f"closed-form dimension {k} disagrees with rank computation {exact}")
        return k, True
    return dimension(code if code is not None else build_lifted(spec)), False


def slice_check_matrices(spec: CodeSpec) -> tuple[BitMatrix, BitMatrix, BitMatrix, BitMatrix]:
    """Check matrices of the four classical slice Tanner codes.

    Returns (H-side A slice, G-side A slice, G'-side B slice, H'-side B slice).
    Kernels of the first and third embed as Z-type candidates (in ker Hx), the
    second and fourth as X-type candidates (in ker Hz).
    """
    grp = spec.group
    order = grp.order
    ident_a = np.broadcast_to(np.arange(order), (spec.n_a, order))
    ident_b = np.broadcast_to(np.arange(order), (spec.n_b, order))
    left = np.stack([grp.table[a] for a in spec.A])
    right = np.stack([grp.table[:, grp.inverse[b]] for b in spec.B])

    def two_blocks(x0, x1, p0, p1, width):
        d = np.concatenate([_lift_block(x0, p0, order), _lift_block(x1, p1, order)])
        return BitMatrix.from_dense(d) if d.shape[0] else BitMatrix.zeros(0, width * order)

    c0, c1, c0p, c1p = spec.local_codes()
    return (
        two_blocks(c0.H, c1.H, ident_a, left, spec.n_a),
        two_blocks(c0.G, c1.G, ident_a, left, spec.n_a),
        two_blocks(c0p.G, c1p.G, ident_b, right, spec.n_b),
        two_blocks(c0p.H, c1p.H, ident_b, right, spec.n_b),
    )


def make_spec(
    group: FiniteGroup,
    A: Sequence,
    B: Sequence,
    c0: LocalCode | str,
    c1: LocalCode | str,
    c0p: LocalCode | str,
    c1p: LocalCode | str,
    comment: str = "",
) -> CodeSpec:
    """Convenience constructor accepting element labels and family names."""

    def code(c):
        return canonical(c) if isinstance(c, str) else c

    return CodeSpec(
        group,
        tuple(group.index(a) for a in A),
        tuple(group.index(b) for b in B),
        code(c0),
        code(c1),
        code(c0p),
        code(c1p),
        comment,
    )
