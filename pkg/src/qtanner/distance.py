"""Exact and randomized (information-set) minimum distance of CSS and classical codes.

The estimator repeats a simple experiment: permute the columns of a basis of
the relevant kernel at random, bring it to reduced row-echelon form, and keep
the lightest row (optionally, sum of two rows) that is a nontrivial logical.
Every value it returns is witnessed by an explicit vector, so it is always an
upper bound on the true distance.

Trials are grouped in fixed chunks; chunk ``c`` draws its permutations from
``SeedSequence([seed, c])``. Results are min-merged in chunk order, which
makes them independent of how many worker threads ran the chunks.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .construction import CssCode
from .errors import RefusalError
from .gf2 import BitMatrix, kernel_basis, pack_rows, rref, unpack_rows
from .local_codes import INF

__all__ = [
    "CHUNK_TRIALS",
    "DistanceEstimate",
    "brute_force_classical_distance",
    "brute_force_css_distance",
    "css_distance",
    "estimate_classical_distance",
    "estimate_css_distance",
    "logical_detectors",
    "verify_estimate",
]

CHUNK_TRIALS = 256
BRUTE_FORCE_MAX_N = 28
_BATCH_BYTES = 48 * 2**20
_NO_HIT = np.iinfo(np.int64).max


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("QTANNER_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class DistanceEstimate:
    """Best nontrivial vector found; ``upper_bound`` is INF when nothing qualifies."""

    upper_bound: float
    witness: np.ndarray | None
    trials_run: int
    seed: int
    side: str
    outcome: str = "found"
    early_exit: bool = False
    target: int | None = None
    depth: int = 1
    trials_requested: int = field(default=0)

    @property
    def found(self) -> bool:
        return self.outcome == "found"

    def to_dict(self) -> dict:
        return {
            "upper_bound": None if self.upper_bound == INF else int(self.upper_bound),
            "witness": None if self.witness is None else "".join(map(str, self.witness.tolist())),
            "trials_run": self.trials_run,
            "trials_requested": self.trials_requested,
            "seed": self.seed,
            "side": self.side,
            "outcome": self.outcome,
            "early_exit": self.early_exit,
            "target": self.target,
            "depth": self.depth,
        }


def _check_side(side: str) -> str:
    s = side.upper()
    if s not in ("X", "Z"):
        raise ValueError(f"side must be 'X' or 'Z', got {side!r}")
    return s


def _checks_for(code: CssCode, side: str) -> tuple[BitMatrix, BitMatrix]:
    """(matrix whose kernel holds the logicals, stabilizer matrix) for a side."""
    return (code.Hx, code.Hz) if side == "Z" else (code.Hz, code.Hx)


def logical_detectors(code: CssCode, side: str) -> BitMatrix:
    """Opposite-type logical representatives: a vector of ker(checks) is a
    nontrivial ``side`` logical iff it has odd overlap with one of these rows."""
    side = _check_side(side)
    checks, stabs = _checks_for(code, side)
    # opposite logicals live in ker(stabs) modulo rowspace(checks)
    candidates = kernel_basis(stabs)
    reduced, pivots = rref(checks)
    dense = candidates.to_dense()
    if pivots and dense.shape[0]:
        coeff = dense[:, pivots].astype(np.float64)
        dense = (dense + (coeff @ reduced.to_dense().astype(np.float64)).astype(np.int64)) & 1
    residual = BitMatrix.from_dense(dense) if dense.shape[0] else BitMatrix.zeros(0, code.n)
    return rref(residual)[0]


# -- exact enumeration ------------------------------------------------------


def _enumerate_min(basis: np.ndarray, detectors: np.ndarray | None) -> tuple[float, np.ndarray | None]:
    """Min weight over span(basis) \\ {0}, restricted to vectors hitting a detector."""
    k = basis.shape[0]
    if k == 0:
        return INF, None
    low_k = min(k, 20)
    low = np.zeros((1, basis.shape[1]), dtype=np.uint64)
    for row in basis[:low_k]:
        low = np.concatenate([low, low ^ row])
    high = basis[low_k:]
    best, best_vec = INF, None
    for mask in range(1 << high.shape[0]):
        offset = np.zeros(basis.shape[1], dtype=np.uint64)
        for b in range(high.shape[0]):
            if (mask >> b) & 1:
                offset ^= high[b]
        words = low ^ offset
        w = np.bitwise_count(words).sum(axis=1, dtype=np.int64)
        if detectors is None:
            ok = w > 0
        else:
            ok = np.zeros(words.shape[0], dtype=bool)
            for det in detectors:
                ok |= (np.bitwise_count(words & det).sum(axis=1) & 1).astype(bool)
        if not ok.any():
            continue
        w = np.where(ok, w, _NO_HIT)
        i = int(np.argmin(w))
        if w[i] < best:
            best, best_vec = int(w[i]), words[i]
    return best, best_vec


def brute_force_css_distance(code: CssCode, side: str, max_n: int = BRUTE_FORCE_MAX_N) -> float:
    """Exact minimum weight of a nontrivial ``side`` logical; INF when k = 0."""
    side = _check_side(side)
    if code.n > max_n:
        raise RefusalError(f"n = {code.n} exceeds the brute-force guard {max_n}; use the estimator")
    checks, _ = _checks_for(code, side)
    det = logical_detectors(code, side)
    if det.rows == 0:
        return INF
    basis = kernel_basis(checks)
    return _enumerate_min(basis.data, det.data)[0]


def brute_force_classical_distance(h: BitMatrix, max_n: int = BRUTE_FORCE_MAX_N) -> float:
    if h.cols > max_n:
        raise RefusalError(f"n = {h.cols} exceeds the brute-force guard {max_n}")
    return _enumerate_min(kernel_basis(h).data, None)[0]


def css_distance(code: CssCode, max_n: int = BRUTE_FORCE_MAX_N) -> float:
    return min(brute_force_css_distance(code, "X", max_n), brute_force_css_distance(code, "Z", max_n))


# -- information-set estimator ----------------------------------------------


def _rref_batch(m: np.ndarray, n: int) -> None:
    """In-place RREF of a stack of packed matrices (t, K, W), all of full row rank."""
    t, k, _ = m.shape
    if k == 0:
        return
    r = np.zeros(t, dtype=np.int64)
    rows = np.arange(k)
    one = np.uint64(1)
    for c in range(n):
        w, b = divmod(c, 64)
        shift = np.uint64(b)
        col = ((m[:, :, w] >> shift) & one).astype(bool)
        cand = col & (rows[None, :] >= r[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        active = np.flatnonzero(has)
        piv = cand[active].argmax(axis=1)
        rr = r[active]
        pivot_rows = m[active, piv].copy()
        m[active, piv] = m[active, rr]
        m[active, rr] = pivot_rows
        hit = ((m[active, :, w] >> shift) & one).astype(bool)
        hit[np.arange(active.size), rr] = False
        m[active] ^= hit[:, :, None].astype(np.uint64) * pivot_rows[:, None, :]
        r[active] += 1
        if r.min() >= k:
            break


class _Problem:
    def __init__(self, basis: BitMatrix, detectors: BitMatrix | None, depth: int):
        self.n = basis.cols
        self.k = basis.rows
        self.basis = basis.to_dense()
        self.detectors = None if detectors is None else detectors.to_dense()
        self.depth = depth

    def run_chunk(self, seed: int, chunk: int, trials: int) -> tuple[int, np.ndarray | None]:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, chunk])))
        perms = np.argsort(rng.random((trials, self.n)), axis=1, kind="stable")
        per_trial = max(1, self.k * self.n * (2 + (0 if self.detectors is None else 1)))
        batch = max(1, min(trials, _BATCH_BYTES // per_trial))
        best, best_vec = _NO_HIT, None
        for start in range(0, trials, batch):
            w, vec = self._run_batch(perms[start : start + batch])
            if w < best:
                best, best_vec = w, vec
        return best, best_vec

    def _run_batch(self, perms: np.ndarray) -> tuple[int, np.ndarray | None]:
        t = perms.shape[0]
        gens = np.transpose(self.basis[:, perms], (1, 0, 2))
        m = pack_rows(gens.reshape(t * self.k, self.n)).reshape(t, self.k, -1)
        _rref_batch(m, self.n)
        if self.depth >= 2 and self.k > 1:
            i, j = np.triu_indices(self.k, 1)
            m = np.concatenate([m, m[:, i] ^ m[:, j]], axis=1)
        weights = np.bitwise_count(m).sum(axis=2, dtype=np.int64)
        if self.detectors is not None:
            dets = np.transpose(self.detectors[:, perms], (1, 0, 2))
            d = dets.shape[1]
            dp = pack_rows(dets.reshape(t * d, self.n)).reshape(t, d, -1)
            ok = np.zeros(weights.shape, dtype=bool)
            for q in range(d):
                ok |= (np.bitwise_count(m & dp[:, q : q + 1, :]).sum(axis=2) & 1).astype(bool)
            weights = np.where(ok, weights, _NO_HIT)
        else:
            weights = np.where(weights > 0, weights, _NO_HIT)
        flat = int(np.argmin(weights))
        ti, ri = divmod(flat, weights.shape[1])
        w = int(weights[ti, ri])
        if w == _NO_HIT:
            return _NO_HIT, None
        permuted = unpack_rows(m[ti, ri][None, :], self.n)[0]
        vec = np.zeros(self.n, dtype=np.uint8)
        vec[perms[ti]] = permuted
        return w, vec


def _run_estimator(problem, trials, seed, side, target, workers, depth) -> DistanceEstimate:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sizes = [CHUNK_TRIALS] * (trials // CHUNK_TRIALS)
    if trials % CHUNK_TRIALS:
        sizes.append(trials % CHUNK_TRIALS)
    workers = workers or default_workers()
    best, best_vec, done, stopped = _NO_HIT, None, 0, False
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for wave in range(0, len(sizes), workers):
            idx = range(wave, min(len(sizes), wave + workers))
            if pool is None:
                results = [problem.run_chunk(seed, c, sizes[c]) for c in idx]
            else:
                results = list(pool.map(lambda c: problem.run_chunk(seed, c, sizes[c]), idx))
            for c, (w, vec) in zip(idx, results):
                done += sizes[c]
                if w < best:
                    best, best_vec = w, vec
                if target is not None and best <= target:
                    stopped = True
                    break
            if stopped:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return DistanceEstimate(
        upper_bound=INF if best == _NO_HIT else best,
        witness=best_vec,
        trials_run=done,
        seed=seed,
        side=side,
        outcome="found" if best != _NO_HIT else "none_found",
        early_exit=stopped and done < trials,
        target=target,
        depth=depth,
        trials_requested=trials,
    )


def estimate_css_distance(
    code: CssCode,
    side: str,
    trials: int,
    seed: int = 0,
    *,
    target: int | None = None,
    depth: int = 1,
    workers: int | None = None,
) -> DistanceEstimate:
    """Upper bound on the minimum weight of a nontrivial ``side`` logical.

    With ``target`` set, stops after the first chunk whose running minimum is
    at most ``target``.
    """
    side = _check_side(side)
    if depth not in (1, 2):
        raise ValueError("depth must be 1 or 2")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    checks, _ = _checks_for(code, side)
    det = logical_detectors(code, side)
    if det.rows == 0:
        return DistanceEstimate(INF, None, 0, seed, side, "no_logicals", False, target, depth, trials)
    problem = _Problem(kernel_basis(checks), det, depth)
    return _run_estimator(problem, trials, seed, side, target, workers, depth)


def estimate_classical_distance(
    h: BitMatrix,
    trials: int,
    seed: int = 0,
    *,
    target: int | None = None,
    depth: int = 1,
    workers: int | None = None,
) -> DistanceEstimate:
    """Upper bound on the minimum distance of ker(h)."""
    if depth not in (1, 2):
        raise ValueError("depth must be 1 or 2")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    basis = kernel_basis(h)
    if basis.rows == 0:
        return DistanceEstimate(INF, None, 0, seed, "classical", "no_codewords", False, target, depth, trials)
    return _run_estimator(_Problem(basis, None, depth), trials, seed, "classical", target, workers, depth)


def verify_estimate(est: DistanceEstimate, code: CssCode | None = None, h: BitMatrix | None = None) -> bool:
    """Independent re-check of a witness: weight, kernel membership, nontriviality."""
    from .logicals import is_nontrivial_logical

    if not est.found:
        return est.witness is None
    v = np.asarray(est.witness, dtype=np.uint8)
    if int(v.sum()) != est.upper_bound:
        return False
    if est.side == "classical":
        if h is None:
            raise ValueError("classical estimates need the check matrix")
        return bool(v.any()) and not (h.to_dense().astype(np.int64) @ v & 1).any()
    if code is None:
        raise ValueError("quantum estimates need the code")
    return is_nontrivial_logical(code, v, est.side)

