"""Search over multisets and local-code permutations for good lifted codes.

Candidates are visited in a canonical order (A multiset, B multiset, then the
local-code choices), each is built, its exact dimension computed, the four
slice Tanner codes screened, and survivors get a quantum distance estimate.
Records are appended to a line-delimited JSON file as they complete, so an
interrupted search can resume by skipping every spec key already on disk.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .construction import CodeSpec, build_lifted, dimension, lifted_dimension, slice_check_matrices
from .distance import estimate_classical_distance, estimate_css_distance, verify_estimate
from .errors import SpecError
from .groups import FiniteGroup, parse_group
from .local_codes import FAMILIES, INF, canonical, distinct_permuted_codes

log = logging.getLogger(__name__)

__all__ = [
    "DEDUP_POLICIES",
    "SearchConfig",
    "SearchRecord",
    "enumerate_multisets",
    "format_table",
    "count_candidates",
    "evaluate_candidate",
    "iter_candidates",
    "load_records",
    "rank_results",
    "run_search",
    "slice_filter",
    "verify_record",
    "write_csv",
]

DEDUP_POLICIES = ("none", "translation", "translation+automorphism")
_AUTOMORPHISM_MAX_ORDER = 64


# -- multisets --------------------------------------------------------------


def _canonical_multiset(ms: Sequence[int], maps: Sequence[Sequence[int]]) -> tuple[int, ...]:
    return min(tuple(sorted(m[x] for x in ms)) for m in maps)


def _symmetry_maps(group: FiniteGroup, dedup: str) -> list[list[int]]:
    if dedup == "none":
        return [list(range(group.order))]
    autos = [list(range(group.order))]
    if dedup == "translation+automorphism" and group.order <= _AUTOMORPHISM_MAX_ORDER:
        autos = [a.tolist() for a in group.automorphisms()]
    maps = set()
    for phi in autos:
        for h in range(group.order):
            maps.add(tuple(group.mul(phi[x], h) for x in range(group.order)))
    return sorted(maps)


def enumerate_multisets(group: FiniteGroup, size: int, dedup: str = "none") -> Iterator[tuple[int, ...]]:
    """Sorted multisets of element indices, one per symmetry class.

    ``translation`` identifies M with M*h; ``translation+automorphism`` also
    with phi(M). Each class is represented by its lexicographically smallest
    member, and representatives are yielded in lexicographic order.
    """
    if size < 1:
        raise ValueError("multiset size must be >= 1")
    if dedup not in DEDUP_POLICIES:
        raise ValueError(f"unknown dedup policy {dedup!r}; expected one of {DEDUP_POLICIES}")
    combos = itertools.combinations_with_replacement(range(group.order), size)
    if dedup == "none":
        yield from combos
        return
    maps = _symmetry_maps(group, dedup)
    reps = {_canonical_multiset(ms, maps) for ms in combos}
    yield from sorted(reps)


# -- config and records -----------------------------------------------------


@dataclass
class SearchConfig:
    """Everything that determines a search; serializable as JSON.

    ``A`` and ``B`` are either a dedup policy name (enumerate multisets of the
    local-code length) or an explicit list of label lists. ``permutations`` is
    ``fix_first`` (first code canonical, second over all distinct
    permutations), ``canonical`` or ``all``.
    """

    group: str
    a_family: str = "ham6"
    b_family: str = "rep2"
    A: str | list = "translation+automorphism"
    B: str | list = "translation+automorphism"
    permutations: str = "fix_first"
    slice_floor: int = 0
    slice_preferred: int = 0
    slice_trials: int = 1000
    estimate_nonpreferred: bool = True
    quantum_trials: int = 50000
    target: int | None = None
    depth: int = 1
    k_filter: list[int] | None = None
    seed: int = 0
    output: str | None = None
    resume: bool = False
    threads: int = 1
    max_candidates: int | None = None
    time_limit: float | None = None
    audit_every: int = 100

    def __post_init__(self):
        problems = []
        for fam in (self.a_family, self.b_family):
            if fam not in FAMILIES:
                problems.append(f"unknown local code family {fam!r}")
        if self.permutations not in ("fix_first", "canonical", "all"):
            problems.append(f"unknown permutation policy {self.permutations!r}")
        for name in ("slice_trials", "quantum_trials", "threads", "audit_every"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        for name in ("slice_floor", "slice_preferred"):
            if getattr(self, name) < 0:
                problems.append(f"{name} must be >= 0")
        if self.depth not in (1, 2):
            problems.append("depth must be 1 or 2")
        for name in ("A", "B"):
            v = getattr(self, name)
            if isinstance(v, str) and v not in DEDUP_POLICIES:
                problems.append(f"{name}: unknown dedup policy {v!r}")
            elif not isinstance(v, (str, list)):
                problems.append(f"{name} must be a dedup policy or a list of multisets")
        if problems:
            raise SpecError("; ".join(problems))

    @classmethod
    def from_dict(cls, obj: dict) -> "SearchConfig":
        if not isinstance(obj, dict):
            raise SpecError("search config must be a mapping")
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise SpecError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        if "group" not in obj:
            raise SpecError("search config is missing key 'group'")
        return cls(**obj)

    def to_dict(self) -> dict:
        return asdict(self)


def _finite(x):
    return None if x is None or x == INF else int(x)


@dataclass
class SearchRecord:
    spec_key: str
    spec: dict
    candidate: int
    n: int
    k: int | None = None
    fast_path: bool = False
    slice_distances: list = field(default_factory=list)
    slice_pass: bool | None = None
    slice_preferred: bool | None = None
    d: int | None = None
    d_x: dict | None = None
    d_z: dict | None = None
    seed: int = 0
    trials: int = 0
    wall_time: float = 0.0
    status: str = "estimated"
    reason: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "SearchRecord":
        return cls(**obj)

    def group(self) -> str:
        return self.spec["group"]


def _candidate_seed(seed: int, key: str) -> int:
    return int(hashlib.sha256(f"{seed}:{key}".encode()).hexdigest()[:12], 16)


# -- candidates -------------------------------------------------------------


def _multisets(group: FiniteGroup, size: int, policy) -> list[tuple[int, ...]]:
    if isinstance(policy, str):
        return list(enumerate_multisets(group, size, policy))
    out = []
    for ms in policy:
        idx = tuple(group.index(x) for x in ms)
        if len(idx) != size:
            raise SpecError(f"multiset {ms} has size {len(idx)}, expected {size}")
        out.append(idx)
    return out


def _code_pairs(family: str, policy: str):
    codes = distinct_permuted_codes(family)
    base = canonical(family)
    if policy == "canonical":
        return [(base, base)]
    if policy == "fix_first":
        return [(base, c) for c in codes]
    return list(itertools.product(codes, codes))


def iter_candidates(config: SearchConfig) -> Iterator[CodeSpec]:
    group = parse_group(config.group)
    a_pairs = _code_pairs(config.a_family, config.permutations)
    b_pairs = _code_pairs(config.b_family, config.permutations)
    n_a, n_b = canonical(config.a_family).n, canonical(config.b_family).n
    a_sets = _multisets(group, n_a, config.A)
    b_sets = _multisets(group, n_b, config.B)
    for a, b, (c0, c1), (c0p, c1p) in itertools.product(a_sets, b_sets, a_pairs, b_pairs):
        yield CodeSpec(group, a, b, c0, c1, c0p, c1p)


def count_candidates(config: SearchConfig) -> int:
    group = parse_group(config.group)
    n_a, n_b = canonical(config.a_family).n, canonical(config.b_family).n
    return (
        len(_multisets(group, n_a, config.A))
        * len(_multisets(group, n_b, config.B))
        * len(_code_pairs(config.a_family, config.permutations))
        * len(_code_pairs(config.b_family, config.permutations))
    )


# -- evaluation -------------------------------------------------------------


def slice_filter(spec: CodeSpec, threshold: float, budget: int, seed: int = 0) -> tuple[bool, list[float]]:
    """Estimate the distances of the four slice codes; pass iff all >= threshold."""
    target = None if threshold in (0, INF) else int(threshold) - 1
    estimates = []
    for i, h in enumerate(slice_check_matrices(spec)):
        est = estimate_classical_distance(h, budget, seed + i, target=target)
        estimates.append(est.upper_bound)
    return all(e >= threshold for e in estimates), estimates


def evaluate_candidate(config: SearchConfig, spec: CodeSpec, index: int) -> SearchRecord:
    start = time.perf_counter()
    key = spec.key()
    seed = _candidate_seed(config.seed, key)
    rec = SearchRecord(spec_key=key, spec=spec.to_dict(), candidate=index, n=spec.n, seed=seed)
    try:
        code = build_lifted(spec)
        audit = index % config.audit_every == 0
        rec.k, rec.fast_path = lifted_dimension(spec, code, audit=audit)
        if rec.k == 0:
            rec.status, rec.reason = "filtered", "k=0"
        elif config.k_filter is not None and rec.k not in config.k_filter:
            rec.status, rec.reason = "filtered", f"k={rec.k} not in k_filter"
        else:
            ok, est = slice_filter(spec, config.slice_floor, config.slice_trials, seed)
            rec.slice_distances = [_finite(e) for e in est]
            rec.slice_pass = ok
            rec.slice_preferred = all(e >= config.slice_preferred for e in est)
            if not ok:
                rec.status, rec.reason = "filtered", "slice floor"
            elif not rec.slice_preferred and not config.estimate_nonpreferred:
                rec.status, rec.reason = "filtered", "slice preference"
            else:
                _estimate(config, code, rec)
    except Exception as exc:  # a bad candidate must not stop the stream
        log.exception("candidate %s failed", key)
        rec.status, rec.reason = "error", f"{type(exc).__name__}: {exc}"
    rec.wall_time = round(time.perf_counter() - start, 4)
    return rec


def _estimate(config: SearchConfig, code, rec: SearchRecord) -> None:
    z = estimate_css_distance(code, "Z", config.quantum_trials, rec.seed, target=config.target, depth=config.depth)
    rec.d_z = z.to_dict()
    best, trials = z.upper_bound, z.trials_run
    if config.target is None or best > config.target:
        x = estimate_css_distance(
            code, "X", config.quantum_trials, rec.seed + 1, target=config.target, depth=config.depth
        )
        rec.d_x = x.to_dict()
        best, trials = min(best, x.upper_bound), max(trials, x.trials_run)
    rec.d = _finite(best)
    rec.trials = trials
    rec.status = "estimated"


def _evaluate_star(args):
    return evaluate_candidate(*args)


# -- persistence ------------------------------------------------------------


def load_records(path: str | os.PathLike) -> list[SearchRecord]:
    """Parse a record file, ignoring a truncated final line."""
    out = []
    p = Path(path)
    if not p.exists():
        return out
    lines = p.read_text().splitlines()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            out.append(SearchRecord.from_dict(json.loads(line)))
        except (json.JSONDecodeError, TypeError):
            if lineno == len(lines):
                log.warning("ignoring truncated final record in %s", path)
                continue
            raise
    return out


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _append_line(path: Path, line: str) -> None:
    fd = os.open(path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
    try:
        os.write(fd, (line + "\n").encode())
        os.fsync(fd)
    finally:
        os.close(fd)


def run_search(config: SearchConfig, progress=None) -> Iterator[SearchRecord]:
    """Evaluate candidates in canonical order, yielding each new record.

    With ``config.output`` set, records are appended to that file as they
    complete; with ``config.resume`` the keys already present are skipped.
    """
    out = Path(config.output) if config.output else None
    done: set[str] = set()
    if out is not None:
        if config.resume and out.exists():
            kept = load_records(out)
            done = {r.spec_key for r in kept}
            # drop any partial line before appending again
            _atomic_write_text(out, "".join(json.dumps(r.to_dict()) + "\n" for r in kept))
        else:
            _atomic_write_text(out, "")

    started = time.monotonic()

    def jobs():
        for index, spec in enumerate(iter_candidates(config)):
            if config.max_candidates is not None and index >= config.max_candidates:
                return
            if config.time_limit is not None and time.monotonic() - started > config.time_limit:
                log.info("time limit reached after %d candidates", index)
                return
            if spec.key() in done:
                continue
            yield (config, spec, index)

    if config.threads > 1:
        pool = ProcessPoolExecutor(max_workers=config.threads)
        results = pool.map(_evaluate_star, jobs(), chunksize=4)
    else:
        pool = None
        results = map(_evaluate_star, jobs())
    try:
        for rec in results:
            if out is not None:
                _append_line(out, json.dumps(rec.to_dict()))
            if progress is not None:
                progress(rec)
            yield rec
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def verify_record(rec: SearchRecord) -> bool:
    """Re-derive k by ranks and re-check every distance witness."""
    if rec.status == "error":
        return True
    spec = CodeSpec.from_dict(rec.spec)
    code = build_lifted(spec)
    if dimension(code) != rec.k:
        return False
    from .distance import DistanceEstimate
    import numpy as np

    for est in (rec.d_x, rec.d_z):
        if not est or est.get("witness") is None:
            continue
        w = np.array([int(c) for c in est["witness"]], dtype=np.uint8)
        de = DistanceEstimate(est["upper_bound"], w, est["trials_run"], est["seed"], est["side"])
        if not verify_estimate(de, code):
            return False
    return True


# -- reporting --------------------------------------------------------------


def rank_results(records: Iterable[SearchRecord]) -> list[dict]:
    """Estimated records sorted by (d desc, k desc, n asc, spec key)."""
    rows = []
    for r in records:
        if r.status != "estimated" or r.d is None:
            continue
        rows.append(
            {
                "n": r.n,
                "k": r.k,
                "d": r.d,
                "d2_over_n": round(r.d * r.d / r.n, 1),
                "group": r.spec["group"],
                "trials": r.trials,
                "seed": r.seed,
                "spec_key": r.spec_key,
            }
        )
    rows.sort(key=lambda row: (-row["d"], -row["k"], row["n"], row["spec_key"]))
    return rows


CSV_HEADER = ["n", "k", "d", "d2_over_n", "group", "trials", "seed", "spec_key"]


def write_csv(rows: Sequence[dict], path: str | os.PathLike | None = None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (f"{row[k]:.1f}" if k == "d2_over_n" else row[k]) for k in CSV_HEADER})
    text = buf.getvalue()
    if path is not None:
        _atomic_write_text(Path(path), text)
    return text


def format_table(rows: Sequence[dict]) -> str:
    header = CSV_HEADER
    cells = [[f"{row[k]:.1f}" if k == "d2_over_n" else str(row[k]) for k in header] for row in rows]
    widths = [max([len(h)] + [len(c[i]) for c in cells]) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(cell, widths)) for cell in cells]
    return "\n".join(lines)
