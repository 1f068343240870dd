"""Corpus sweeps that check the closed forms against rank and brute-force oracles.

Used by the ``verify-lemma`` and ``verify-theorem`` commands and by the test
suite. Every failure is returned as a serializable counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .construction import (
    CodeSpec,
    CssCode,
    base_params_lemma,
    build_base,
    build_lifted,
    dimension,
    lemma_distance_literal,
    local_code_to_dict,
    theorem1_dimension,
    theorem1_eligible,
)
from .distance import brute_force_css_distance
from .errors import PreconditionError
from .gf2 import BitMatrix, kernel_basis
from .groups import cyclic, direct_product
from .local_codes import LocalCode, canonical, distinct_permuted_codes, random_local_code
from .logicals import base_logical_basis, in_kernel

__all__ = [
    "LemmaCase",
    "SweepReport",
    "basis_violations",
    "lemma_corpus",
    "lemma_sweep",
    "random_css_code",
    "theorem_control",
    "theorem_corpus",
    "theorem_sweep",
]

LEMMA_SEED = 20261018


@dataclass(frozen=True)
class LemmaCase:
    label: str
    codes: tuple[LocalCode, LocalCode, LocalCode, LocalCode]

    def to_dict(self) -> dict:
        names = ("c0", "c1", "c0p", "c1p")
        return {"label": self.label, "local_codes": {k: local_code_to_dict(c) for k, c in zip(names, self.codes)}}


@dataclass
class SweepReport:
    checked: int = 0
    failures: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def lemma_corpus(random_pairs: int = 200, seed: int = LEMMA_SEED, max_n: int = 8) -> Iterator[LemmaCase]:
    """All 30x30 ham6 pairs against rep2/rep2, then random custom code pairs."""
    rep = canonical("rep2")
    codes = distinct_permuted_codes("ham6")
    for i, c0 in enumerate(codes):
        for j, c1 in enumerate(codes):
            yield LemmaCase(f"ham6[{i}]/ham6[{j}]", (c0, c1, rep, rep))
    rng = np.random.default_rng(seed)
    for t in range(random_pairs):
        n_a, n_b = (int(x) for x in rng.integers(1, max_n + 1, size=2))
        quad = (
            random_local_code(n_a, rng),
            random_local_code(n_a, rng),
            random_local_code(n_b, rng),
            random_local_code(n_b, rng),
        )
        yield LemmaCase(f"random[{t}]", quad)


def basis_violations(case: LemmaCase, base: CssCode | None = None) -> list[str]:
    """Problems with the row/column logical basis of a base code (empty when fine)."""
    base = base or build_base(*case.codes)
    basis = base_logical_basis(*case.codes)
    out = []
    k = dimension(base)
    if len(basis) != k:
        out.append(f"basis has {len(basis)} pairs but k = {k}")
    if len(basis) and not np.array_equal(basis.pairing(), np.eye(len(basis), dtype=np.uint8)):
        out.append("pairing matrix is not the identity")
    n_a, n_b = base.n_a, base.n_b
    for s, (x, z, (family, _, _)) in enumerate(zip(basis.x_ops, basis.z_ops, basis.meta)):
        if not in_kernel(base.Hz, x):
            out.append(f"X logical {s} not in ker(Hz)")
        if not in_kernel(base.Hx, z):
            out.append(f"Z logical {s} not in ker(Hx)")
        for name, v in (("X", x), ("Z", z)):
            rows, cols = np.nonzero(v.reshape(n_a, n_b))
            if len(set(rows)) > 1 and len(set(cols)) > 1:
                out.append(f"{name} logical {s} ({family}) spans several rows and columns")
    return out


def lemma_sweep(
    random_pairs: int = 200,
    seed: int = LEMMA_SEED,
    max_n: int = 8,
    distance_max_n: int = 24,
    check_distance: bool = True,
    check_basis: bool = True,
) -> dict[str, SweepReport]:
    """Dimension, distance and basis identities over :func:`lemma_corpus`.

    The distance sweep covers base codes with n_A * n_B <= ``distance_max_n``
    and k > 0. It checks the side-resolved closed form and separately counts
    disagreements with the four-way minimum.
    """
    dim, dist, basis = SweepReport(), SweepReport(), SweepReport()
    literal_misses: list[dict] = []
    for case in lemma_corpus(random_pairs, seed, max_n):
        base = build_base(*case.codes)
        k_exact = dimension(base)
        k_lemma, d_lemma = base_params_lemma(*case.codes)
        dim.checked += 1
        if k_lemma != k_exact:
            dim.failures.append({**case.to_dict(), "k_lemma": k_lemma, "k_rank": k_exact})
        if check_basis:
            basis.checked += 1
            problems = basis_violations(case, base)
            if problems:
                basis.failures.append({**case.to_dict(), "problems": problems})
        if check_distance and k_exact > 0 and base.n <= distance_max_n:
            d_exact = min(brute_force_css_distance(base, "X"), brute_force_css_distance(base, "Z"))
            dist.checked += 1
            if d_lemma != d_exact:
                dist.failures.append({**case.to_dict(), "d_lemma": d_lemma, "d_brute": d_exact})
            d_literal = lemma_distance_literal(*case.codes)
            if d_literal != d_exact:
                literal_misses.append({**case.to_dict(), "d_literal": d_literal, "d_brute": d_exact})
    dist.notes["literal_disagreements"] = literal_misses
    return {"dimension": dim, "distance": dist, "basis": basis}


def theorem_corpus(
    m_values=range(2, 13), pairs_per_m: int = 50, seed: int = LEMMA_SEED, families=("ham6", "ham8")
) -> Iterator[CodeSpec]:
    """Cyclic groups with B = (0, 1), rep2 on the B side and sampled A-side pairs."""
    rng = np.random.default_rng(seed)
    rep = canonical("rep2")
    for m in m_values:
        grp = cyclic(m)
        for t in range(pairs_per_m):
            family = families[t % len(families)]
            codes = distinct_permuted_codes(family)
            i, j = (int(x) for x in rng.integers(0, len(codes), size=2))
            a = tuple(int(x) for x in rng.integers(0, m, size=codes[0].n))
            yield CodeSpec(grp, a, (0, 1), codes[i], codes[j], rep, rep, comment=f"C{m} {family}[{i}]/{family}[{j}]")


def theorem_sweep(m_values=range(2, 13), pairs_per_m: int = 50, seed: int = LEMMA_SEED) -> SweepReport:
    report = SweepReport()
    for spec in theorem_corpus(m_values, pairs_per_m, seed):
        report.checked += 1
        if not theorem1_eligible(spec):
            report.failures.append({"spec": spec.to_dict(), "problem": "not eligible"})
            continue
        closed, exact = theorem1_dimension(spec), dimension(build_lifted(spec))
        if closed != exact:
            report.failures.append({"spec": spec.to_dict(), "k_closed_form": closed, "k_rank": exact})
    return report


def theorem_control() -> dict:
    """C2 x C2 with B = (e, x): the closed form must refuse, ranks still work."""
    grp = direct_product(cyclic(2), cyclic(2))
    ham, rep = canonical("ham6"), canonical("rep2")
    spec = CodeSpec(grp, (0, 1, 2, 3, 0, 1), (0, 2), ham, ham, rep, rep, comment="non-transitive control")
    try:
        theorem1_dimension(spec)
        refused = False
    except PreconditionError:
        refused = True
    return {"spec": spec, "refused": refused, "eligible": theorem1_eligible(spec), "k_rank": dimension(build_lifted(spec))}


def random_css_code(n: int, rng: np.random.Generator) -> CssCode:
    """Random CSS code: Hx of random rank, Hz a random subset of combinations in ker(Hx)."""
    rx = int(rng.integers(1, max(2, n // 2)))
    hx = BitMatrix.from_dense(rng.integers(0, 2, size=(rx, n), dtype=np.uint8))
    ker = kernel_basis(hx)
    rz = int(rng.integers(0, max(1, ker.rows - 1))) if ker.rows > 1 else 0
    if rz:
        mix = rng.integers(0, 2, size=(rz, ker.rows), dtype=np.int64)
        hz = BitMatrix.from_dense((mix @ ker.to_dense().astype(np.int64)) & 1)
    else:
        hz = BitMatrix.zeros(0, n)
    return CssCode.from_matrices(hx, hz, provenance=("random", n))
