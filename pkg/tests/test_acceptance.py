"""Acceptance criteria 1-11. Each test records one pass/fail line, printed in
the terminal summary under "acceptance criteria"."""

import json
import os
import time

import numpy as np
import pytest

from qtanner.construction import (
    CodeSpec,
    build_lifted,
    css_violation,
    dimension,
    lemma_distance_literal,
)
from qtanner.distance import brute_force_css_distance, estimate_css_distance, verify_estimate
from qtanner.formats import dump_spec, parse_alist, to_alist
from qtanner.gf2 import BitMatrix
from qtanner.groups import cyclic, parse_group
from qtanner.local_codes import canonical, distinct_permuted_codes, random_local_code
from qtanner.logicals import base_logical_basis, replicate_base_logicals
from qtanner.search import SearchConfig, count_candidates, rank_results, run_search, verify_record
from qtanner.sweeps import LEMMA_SEED, lemma_sweep, random_css_code, theorem_control, theorem_sweep

from conftest import record_criterion

# stretch criterion 9: wall-clock budget in seconds for the in-suite search
C9_BUDGET = float(os.environ.get("QTANNER_C9_BUDGET", "1800"))


@pytest.fixture(scope="module")
def lemma_reports():
    start = time.perf_counter()
    reports = lemma_sweep(random_pairs=200, seed=LEMMA_SEED, max_n=8, distance_max_n=24)
    return reports, time.perf_counter() - start


def test_criterion_01_lemma_dimension(lemma_reports):
    reports, elapsed = lemma_reports
    dim = reports["dimension"]
    ok = dim.checked == 1100 and not dim.failures
    record_criterion(1, ok, f"{dim.checked - len(dim.failures)}/{dim.checked} dimension identities exact "
                            f"(900 ham6 pairs + 200 random), sweep {elapsed:.0f}s")
    assert ok, dim.failures[:3]


def test_criterion_02_lemma_distance(lemma_reports):
    """The four-way minimum as stated, compared with brute force.

    The side-resolved closed form used by the library is checked alongside;
    the four-way minimum over-counts when one logical family is empty.
    """
    reports, _ = lemma_reports
    dist = reports["distance"]
    literal = dist.notes["literal_disagreements"]
    ok = dist.checked > 0 and not literal
    detail = (f"four-way minimum = brute force on {dist.checked - len(literal)}/{dist.checked} codes; "
              f"side-resolved form on {dist.checked - len(dist.failures)}/{dist.checked}")
    if literal:
        cx = literal[0]
        detail += f"; counterexample {cx['label']}: minimum {cx['d_literal']} vs brute force {cx['d_brute']}"
    record_criterion(2, ok, detail)
    assert not dist.failures, dist.failures[:3]
    assert ok, json.dumps(literal[:1], default=str)


def test_criterion_03_symplectic_basis(lemma_reports):
    reports, _ = lemma_reports
    basis = reports["basis"]
    ok = basis.checked == 1100 and not basis.failures
    record_criterion(3, ok, f"{len(basis.failures)} violations over {basis.checked} base codes "
                            "(pairing = I, kernel membership, single row/column support)")
    assert ok, basis.failures[:3]


def test_criterion_04_theorem1():
    start = time.perf_counter()
    report = theorem_sweep(range(2, 13), pairs_per_m=50, seed=LEMMA_SEED)
    control = theorem_control()
    elapsed = time.perf_counter() - start
    ok = report.checked == 550 and not report.failures and control["refused"] and not control["eligible"]
    record_criterion(4, ok, f"{len(report.failures)} violations over {report.checked} cyclic specs (m = 2..12); "
                            f"C2xC2 control refused = {control['refused']}, rank path k = {control['k_rank']}; "
                            f"{elapsed:.0f}s")
    assert ok, report.failures[:3]


def test_criterion_05_thirty_codes():
    counts = {f: len(distinct_permuted_codes(f)) for f in ("ham6", "ham8")}
    ok = counts == {"ham6": 30, "ham8": 30}
    record_criterion(5, ok, f"distinct permuted codes: {counts}")
    assert ok


def test_criterion_06_fig1_css():
    start = time.perf_counter()
    ham = canonical("ham6")
    spec = CodeSpec(cyclic(46), range(6), range(0, 12, 2), ham, ham, ham, ham)
    code = build_lifted(spec)
    valid = not css_violation(code)
    elapsed = time.perf_counter() - start
    ok = code.n == 1656 and valid and elapsed < 30
    record_criterion(6, ok, f"n = {code.n}, Hx*Hz^T = 0: {valid}, {elapsed:.1f}s")
    assert ok


def test_criterion_07_estimator_oracle():
    rng = np.random.default_rng(LEMMA_SEED)
    matches, witnesses_ok, cases = 0, 0, []
    for t in range(100):
        n = int(rng.integers(4, 21))
        code = random_css_code(n, rng)
        side = "XZ"[t % 2]
        exact = brute_force_css_distance(code, side)
        est = estimate_css_distance(code, side, 1000, seed=t)
        matches += est.upper_bound == exact
        witnesses_ok += verify_estimate(est, code)
        cases.append((code, side))
    monotone = determinism = 0
    for t, (code, side) in enumerate(cases[:20]):
        bounds = [estimate_css_distance(code, side, trials, seed=1000 + t).upper_bound for trials in (10, 100, 1000)]
        monotone += bounds == sorted(bounds, reverse=True)
        runs = [estimate_css_distance(code, side, 300, seed=t) for _ in range(2)]
        determinism += runs[0].upper_bound == runs[1].upper_bound and (
            runs[0].witness is None or np.array_equal(runs[0].witness, runs[1].witness)
        )
    ok = matches >= 99 and witnesses_ok == 100 and monotone == 20 and determinism == 20
    record_criterion(7, ok, f"{matches}/100 match brute force, {witnesses_ok}/100 witnesses verify, "
                            f"monotone {monotone}/20, deterministic {determinism}/20")
    assert ok


def test_criterion_08_table2a_row(tmp_path):
    config = SearchConfig(
        group="cyclic(5)",
        a_family="ham6",
        b_family="rep2",
        A="translation+automorphism",
        B=[["0", "1"]],
        permutations="fix_first",
        quantum_trials=50_000,
        k_filter=[2],
        target=7,
        seed=1,
        output=str(tmp_path / "c5.jsonl"),
    )
    start = time.perf_counter()
    records = list(run_search(config))
    elapsed = time.perf_counter() - start
    rows = rank_results(records)
    hits = [r for r in records if r.status == "estimated" and r.k == 2 and r.d == 8]
    full = [r for r in hits if r.d_x["trials_run"] == r.d_z["trials_run"] == 50_000]
    top = rows[0] if rows else None
    ok = bool(full) and top is not None and (top["n"], top["k"], top["d"], top["d2_over_n"]) == (60, 2, 8, 1.1)
    ok = ok and all(verify_record(r) for r in full)
    detail = f"{len(records)}/{count_candidates(config)} candidates in {elapsed:.0f}s; "
    if full:
        detail += f"best (60,2,8) d^2/n = {top['d2_over_n']}, spec {full[0].spec_key}, seed {full[0].seed}"
    else:
        detail += "no (60,2,8) record"
    record_criterion(8, ok, detail)
    assert ok


C9_FILTER = dict(
    group="product(cyclic(2),cyclic(2))",
    a_family="ham6",
    b_family="ham6",
    A="translation+automorphism",
    B="translation+automorphism",
    permutations="fix_first",
    k_filter=[12],
    slice_floor=8,
    slice_trials=300,
    target=9,
    quantum_trials=50_000,
    seed=1,
)


@pytest.mark.slow
def test_criterion_09_table2b_stretch(tmp_path):
    config = SearchConfig(**C9_FILTER, time_limit=C9_BUDGET, output=str(tmp_path / "c9.jsonl"))
    start = time.perf_counter()
    records, hits = [], []
    for rec in run_search(config):
        records.append(rec)
        if rec.status == "estimated" and rec.k == 12 and rec.d is not None and rec.d >= 10:
            hits.append(rec)
            break
    elapsed = time.perf_counter() - start
    estimated = [r for r in records if r.status == "estimated"]
    best = max(estimated, key=lambda r: r.d or 0, default=None)
    coverage = f"{len(records)}/{count_candidates(config)} candidates, {len(estimated)} with k = 12 estimated, {elapsed:.0f}s"
    if hits:
        hit = hits[0]
        assert verify_record(hit)
        record_criterion(9, True, f"[[144,12,{hit.d}]] spec {hit.spec_key} seed {hit.seed}; {coverage}")
        return
    best_txt = f"best [[144,12,{best.d}]]" if best else "no k = 12 candidate reached"
    record_criterion(9, None, f"budget {C9_BUDGET:.0f}s exhausted; {best_txt}; {coverage}")
    pytest.skip("criterion 9 inconclusive within the in-suite budget")


def test_criterion_10_odd_replication():
    rng = np.random.default_rng(LEMMA_SEED)
    rep = canonical("rep2")
    certified = 0
    for t in range(20):
        m = (3, 5, 7, 9, 11)[t % 5]
        family = ("ham6", "ham8")[t % 2]
        codes = distinct_permuted_codes(family)
        i, j = (int(x) for x in rng.integers(0, 30, size=2))
        a = tuple(int(x) for x in rng.integers(0, m, size=codes[0].n))
        spec = CodeSpec(cyclic(m), a, (0, 1), codes[i], codes[j], rep, rep)
        base = base_logical_basis(*spec.local_codes())
        lifted = build_lifted(spec)
        replicated = replicate_base_logicals(base, spec, lifted)
        weights_ok = all(int(r.sum()) == m * int(b.sum()) for b, r in zip(base.x_ops, replicated.x_ops))
        certified += len(replicated) == dimension(lifted) and weights_ok
    ok = certified == 20
    record_criterion(10, ok, f"{certified}/20 odd-order specs certified (kernel membership, pairing = I)")
    assert ok


def random_spec(rng) -> CodeSpec:
    desc = ["cyclic(1)", "cyclic(4)", "cyclic(7)", "product(cyclic(2),cyclic(3))", "quaternion8",
            "semidirect_c4_c4(nontrivial)"][int(rng.integers(0, 6))]
    grp = parse_group(desc)

    def code(n_choice):
        kind = int(rng.integers(0, 3))
        if kind == 0:
            fam = ("ham6", "ham8", "rep2")[n_choice]
            codes = distinct_permuted_codes(fam)
            return codes[int(rng.integers(0, len(codes)))]
        if kind == 1:
            fam = ("ham6", "ham8", "rep2")[n_choice]
            return canonical(fam).permuted(rng.permutation(canonical(fam).n))
        return random_local_code((6, 8, 2)[n_choice], rng)

    na, nb = int(rng.integers(0, 3)), int(rng.integers(0, 3))
    size_a, size_b = (6, 8, 2)[na], (6, 8, 2)[nb]
    return CodeSpec(
        grp,
        rng.integers(0, grp.order, size_a),
        rng.integers(0, grp.order, size_b),
        code(na),
        code(na),
        code(nb),
        code(nb),
        comment=f"random spec {int(rng.integers(0, 1 << 30))}",
    )


def test_criterion_11_roundtrips():
    rng = np.random.default_rng(LEMMA_SEED)
    matrices = specs = 0
    for _ in range(1000):
        rows, cols = int(rng.integers(0, 30)), int(rng.integers(0, 70))
        dense = (rng.random((rows, cols)) < rng.random()).astype(np.uint8)
        m = BitMatrix.from_dense(dense) if rows else BitMatrix.zeros(0, cols)
        matrices += parse_alist(to_alist(m)) == m
    for _ in range(1000):
        spec = random_spec(rng)
        back = CodeSpec.from_dict(json.loads(dump_spec(spec)))
        specs += back == spec and back.comment == spec.comment and dump_spec(back) == dump_spec(spec)
    ok = matrices == 1000 and specs == 1000
    record_criterion(11, ok, f"alist {matrices}/1000 and spec-file {specs}/1000 bit-exact round trips")
    assert ok
