import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtanner.construction import CssCode, build_base, build_lifted, dimension
from qtanner.distance import (
    DistanceEstimate,
    brute_force_classical_distance,
    brute_force_css_distance,
    css_distance,
    estimate_classical_distance,
    estimate_css_distance,
    logical_detectors,
    verify_estimate,
)
from qtanner.errors import RefusalError
from qtanner.formats import read_spec
from qtanner.gf2 import BitMatrix
from qtanner.local_codes import INF, canonical
from qtanner.sweeps import random_css_code

from pathlib import Path

DATA = Path(__file__).parent / "data"


def rep2_code():
    r = canonical("rep2")
    return build_base(r, r, r, r)


def naive_css_distance(code: CssCode, side: str) -> float:
    """Enumerate all 2^n vectors; fine for n <= 14."""
    checks, stabs = (code.Hx, code.Hz) if side == "Z" else (code.Hz, code.Hx)
    from qtanner.logicals import is_nontrivial_logical

    best = INF
    n = code.n
    c = checks.to_dense().astype(np.int64)
    for x in range(1, 2**n):
        v = np.array([(x >> i) & 1 for i in range(n)], dtype=np.uint8)
        w = int(v.sum())
        if w >= best or (c.size and ((c @ v) & 1).any()):
            continue
        if is_nontrivial_logical(code, v, side):
            best = w
    return best


@given(st.integers(4, 11), st.integers(0, 2**32 - 1), st.sampled_from("XZ"))
def test_brute_force_matches_naive(n, seed, side):
    code = random_css_code(n, np.random.default_rng(seed))
    assert brute_force_css_distance(code, side) == naive_css_distance(code, side)


@given(st.integers(4, 16), st.integers(0, 2**32 - 1), st.sampled_from("XZ"))
def test_estimate_is_an_upper_bound_with_valid_witness(n, seed, side):
    code = random_css_code(n, np.random.default_rng(seed))
    est = estimate_css_distance(code, side, 300, seed=seed % 1000)
    exact = brute_force_css_distance(code, side)
    assert est.upper_bound >= exact
    assert verify_estimate(est, code)
    if exact == INF:
        assert est.outcome == "no_logicals" and est.witness is None


def test_four_two_two_estimate():
    code = rep2_code()
    for side in "XZ":
        est = estimate_css_distance(code, side, 100, seed=3)
        assert est.upper_bound == 2 and est.found
        assert verify_estimate(est, code)
        assert est.trials_run == 100 and est.seed == 3 and est.side == side


def test_seed_determinism_and_worker_independence():
    code = build_lifted(read_spec(DATA / "c5_60_2_8.json"))
    a = estimate_css_distance(code, "Z", 600, seed=11, workers=1)
    b = estimate_css_distance(code, "Z", 600, seed=11, workers=3)
    c = estimate_css_distance(code, "Z", 600, seed=11, workers=1)
    assert a.upper_bound == b.upper_bound == c.upper_bound
    assert np.array_equal(a.witness, b.witness) and np.array_equal(a.witness, c.witness)


def test_monotone_in_trials():
    code = build_lifted(read_spec(DATA / "c5_60_2_8.json"))
    bounds = [estimate_css_distance(code, "X", t, seed=5).upper_bound for t in (1, 10, 256, 700, 2000)]
    assert bounds == sorted(bounds, reverse=True)


def test_depth_two_never_worse():
    code = build_lifted(read_spec(DATA / "c5_60_2_8.json"))
    d1 = estimate_css_distance(code, "Z", 300, seed=2, depth=1)
    d2 = estimate_css_distance(code, "Z", 300, seed=2, depth=2)
    assert d2.upper_bound <= d1.upper_bound
    assert verify_estimate(d2, code)


def test_pinned_instance_reaches_eight():
    spec = read_spec(DATA / "c5_60_2_8.json")
    code = build_lifted(spec)
    assert code.n == 60 and dimension(code) == 2
    best = min(estimate_css_distance(code, s, 3000, seed=1).upper_bound for s in "XZ")
    assert best == 8


def test_pinned_c2xc2_instance():
    spec = read_spec(DATA / "c2xc2_144_12_11.json")
    code = build_lifted(spec)
    assert code.n == 144 and dimension(code) == 12
    for side in "XZ":
        est = estimate_css_distance(code, side, 2000, seed=1)
        assert est.upper_bound >= 11 and verify_estimate(est, code)


def test_early_exit():
    code = build_lifted(read_spec(DATA / "c5_60_2_8.json"))
    est = estimate_css_distance(code, "Z", 50_000, seed=0, target=20)
    assert est.early_exit and est.trials_run < 50_000 and est.upper_bound <= 20
    assert est.trials_requested == 50_000 and est.target == 20


def test_no_logicals():
    hx = BitMatrix.identity(3)
    code = CssCode.from_matrices(hx, BitMatrix.zeros(0, 3))
    est = estimate_css_distance(code, "Z", 10)
    assert est.outcome == "no_logicals" and est.upper_bound == INF and not est.found
    assert verify_estimate(est, code)
    assert brute_force_css_distance(code, "Z") == INF


def test_brute_force_refuses_large_codes():
    code = CssCode.from_matrices(BitMatrix.zeros(0, 40), BitMatrix.zeros(0, 40))
    with pytest.raises(RefusalError):
        brute_force_css_distance(code, "X")


def test_css_distance_is_min_of_sides():
    code = rep2_code()
    assert css_distance(code) == 2


def test_classical_estimates():
    h = canonical("ham6").H
    assert brute_force_classical_distance(h) == 3
    est = estimate_classical_distance(h, 50, seed=1)
    assert est.upper_bound == 3 and verify_estimate(est, h=h)
    full = estimate_classical_distance(BitMatrix.identity(4), 5)
    assert full.outcome == "no_codewords"


def test_detectors_span_opposite_logicals():
    code = rep2_code()
    assert logical_detectors(code, "Z").rows == dimension(code)


def test_tampered_witness_fails_verification():
    code = rep2_code()
    est = estimate_css_distance(code, "X", 50, seed=0)
    assert verify_estimate(est, code)
    outside = DistanceEstimate(1, np.array([1, 0, 0, 0], dtype=np.uint8), 50, 0, "X")
    wrong_weight = DistanceEstimate(3, np.array([1, 0, 0, 1], dtype=np.uint8), 50, 0, "X")
    stab = DistanceEstimate(4, np.ones(4, dtype=np.uint8), 50, 0, "X")
    assert not verify_estimate(outside, code)
    assert not verify_estimate(wrong_weight, code)
    assert not verify_estimate(stab, code)


def test_argument_validation():
    code = rep2_code()
    with pytest.raises(ValueError):
        estimate_css_distance(code, "Y", 10)
    with pytest.raises(ValueError):
        estimate_css_distance(code, "X", 0)
    with pytest.raises(ValueError):
        estimate_css_distance(code, "X", 10, depth=3)


def test_to_dict_embeds_seed():
    est = estimate_css_distance(rep2_code(), "Z", 10, seed=99)
    d = est.to_dict()
    assert d["seed"] == 99 and d["upper_bound"] == 2 and len(d["witness"]) == 4
