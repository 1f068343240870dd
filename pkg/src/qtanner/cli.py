"""``qtanner`` command line.

Exit codes: 0 success, 1 usage or parse error, 2 verification failure,
3 I/O error. Reports go to stdout, progress to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .construction import (
    CssCode,
    build_lifted,
    css_violation,
    dimension,
    lifted_dimension,
)
from .distance import default_workers, estimate_css_distance, verify_estimate
from .errors import IntegrityError, PreconditionError, RefusalError, SpecError
from .formats import FormatError, import_matrix, read_json, read_spec, spec_hash, write_code, write_text_atomic
from .groups import GroupDescriptorError
from .local_codes import INF
from .search import SearchConfig, format_table, load_records, rank_results, run_search, verify_record, write_csv
from .sweeps import LEMMA_SEED, lemma_sweep, theorem_control, theorem_sweep

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class VerificationFailure(Exception):
    def __init__(self, message: str, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt_d(x) -> str:
    return "inf" if x is None or x == INF else str(int(x))


def _threads(args) -> int:
    return args.threads if args.threads is not None else default_workers()


# -- commands ---------------------------------------------------------------


def cmd_build(args, fmt: str = "alist") -> int:
    spec = read_spec(args.spec)
    code = build_lifted(spec)
    for path in write_code(code, args.out, spec, fmt=getattr(args, "format", fmt)):
        print(path)
    print(f"n = {code.n}, Hx {code.Hx.rows}x{code.Hx.cols}, Hz {code.Hz.rows}x{code.Hz.cols}")
    return EXIT_OK


def _check_lines(code: CssCode) -> list[str]:
    bad = css_violation(code)
    return [f"n = {code.n}", f"Hx {code.Hx.rows}x{code.Hx.cols}, Hz {code.Hz.rows}x{code.Hz.cols}",
            "CSS condition Hx*Hz^T = 0: " + ("VIOLATED" if bad else "ok")]


def cmd_check(args) -> int:
    spec = read_spec(args.spec)
    problems = list(spec.problems())
    for name, lc in zip(("c0", "c1", "c0p", "c1p"), spec.local_codes()):
        problems += [f"local code {name}: {p}" for p in lc.problems()]
    code = build_lifted(spec)
    lines = _check_lines(code)
    if css_violation(code):
        problems.append("Hx*Hz^T != 0")
    print(f"spec {spec_hash(spec)[:16]}  group {spec.group.descriptor}  |A| = {spec.n_a}  |B| = {spec.n_b}")
    print("\n".join(lines))
    for p in problems:
        print(f"violated: {p}")
    if problems:
        raise VerificationFailure("spec check failed", {"spec": spec.to_dict(), "violations": problems})
    print("all invariants hold")
    return EXIT_OK


def cmd_import_check(args) -> int:
    hx, hz = import_matrix(args.hx), import_matrix(args.hz)
    if hx.cols != hz.cols:
        raise VerificationFailure(f"Hx has {hx.cols} columns but Hz has {hz.cols}")
    code = CssCode.from_matrices(hx, hz, provenance=("import", args.hx, args.hz))
    print("\n".join(_check_lines(code)))
    if css_violation(code):
        raise VerificationFailure("imported matrices do not commute")
    print(f"k = {dimension(code)}")
    return EXIT_OK


def cmd_dim(args) -> int:
    spec = read_spec(args.spec)
    k, fast = lifted_dimension(spec, audit=not args.no_audit)
    how = "theorem1 fast path" + ("" if args.no_audit else ", audited") if fast else "rank computation"
    print(f"n = {spec.n}")
    print(f"k = {k} ({how})")
    return EXIT_OK


def cmd_distance(args) -> int:
    spec = read_spec(args.spec)
    code = build_lifted(spec)
    sides = ["X", "Z"] if args.side == "both" else [args.side.upper()]
    best = INF
    failed = False
    for offset, side in enumerate(sides):
        est = estimate_css_distance(
            code, side, args.trials, args.seed + offset, target=args.target, depth=args.depth, workers=_threads(args)
        )
        ok = verify_estimate(est, code)
        failed |= not ok
        best = min(best, est.upper_bound)
        info = {k: v for k, v in est.to_dict().items() if k != "witness"}
        print(f"side {side}: " + " ".join(f"{k}={v}" for k, v in info.items()))
        if est.found:
            print(f"  witness: {''.join(map(str, est.witness.tolist()))}")
    verdict = "witness verified" if not failed else "WITNESS FAILED VERIFICATION"
    if best == INF:
        print("no nontrivial logical found")
    else:
        print(f"d ≤ {_fmt_d(best)}, {verdict}")
    if failed:
        raise VerificationFailure("witness failed verification")
    return EXIT_OK


def cmd_search(args) -> int:
    obj = read_json(args.config)
    if not isinstance(obj, dict):
        raise SpecError(f"{args.config}: search config must be a mapping")
    if args.resume:
        obj["resume"] = True
    if args.threads is not None:
        obj["threads"] = args.threads
    if args.out:
        obj["output"] = args.out
    if args.trials is not None:
        obj["quantum_trials"] = args.trials
    if args.seed is not None:
        obj["seed"] = args.seed
    config = SearchConfig.from_dict(obj)
    if config.output is None:
        config.output = str(Path(args.config).with_suffix(".records.jsonl"))
    started = time.monotonic()
    counts = {"estimated": 0, "filtered": 0, "error": 0}

    def progress(rec):
        counts[rec.status] = counts.get(rec.status, 0) + 1
        total = sum(counts.values())
        if total % 10 == 0 or rec.status == "estimated":
            print(
                f"[{time.monotonic() - started:7.1f}s] {total} done, best so far in {rec.spec_key}: "
                f"k={rec.k} d={rec.d} ({rec.status})",
                file=sys.stderr,
            )

    for _ in run_search(config, progress):
        pass
    rows = rank_results(load_records(config.output))
    csv_path = str(Path(config.output).with_suffix(".csv"))
    write_csv(rows, csv_path)
    print(f"records: {config.output}")
    print(f"results: {csv_path}")
    print(" ".join(f"{k}={v}" for k, v in counts.items()))
    if rows:
        print(format_table(rows[: args.top]))
    return EXIT_OK


def cmd_report(args) -> int:
    records = load_records(args.records)
    rows = rank_results(records)
    if args.verify:
        bad = [r.spec_key for r in records if not verify_record(r)]
        if bad:
            raise VerificationFailure("records failed re-verification", {"spec_keys": bad})
        print(f"{len(records)} records re-verified")
    if args.out:
        write_csv(rows, args.out)
    print(format_table(rows[: args.top]))
    return EXIT_OK


def cmd_verify_lemma(args) -> int:
    reports = lemma_sweep(
        random_pairs=args.random, seed=args.seed, check_distance=not args.no_distance, check_basis=True
    )
    dim = reports["dimension"]
    ham_cases = dim.checked - args.random
    ham_fail = sum(1 for f in dim.failures if f["label"].startswith("ham6"))
    print(f"{ham_cases - ham_fail}/{ham_cases} dimension identities hold")
    print(f"{args.random - (len(dim.failures) - ham_fail)}/{args.random} random-pair dimension identities hold")
    dist = reports["distance"]
    if not args.no_distance:
        print(f"{dist.checked - len(dist.failures)}/{dist.checked} distance identities hold (brute force)")
        lit = dist.notes["literal_disagreements"]
        print(f"four-way minimum disagrees with brute force in {len(lit)} case(s)")
    basis = reports["basis"]
    print(f"{basis.checked - len(basis.failures)}/{basis.checked} logical bases certified")
    failures = dim.failures + dist.failures + basis.failures
    if failures:
        raise VerificationFailure("lemma sweep found counterexamples", failures)
    return EXIT_OK


def cmd_verify_theorem(args) -> int:
    m_values = range(args.m_min, args.m_max + 1)
    report = theorem_sweep(m_values, args.pairs, args.seed)
    print(f"{report.checked} specs checked for m in {args.m_min}..{args.m_max}")
    print(f"{len(report.failures)} violations")
    control = theorem_control()
    print(f"control {control['spec'].group.descriptor}: fast path refused = {control['refused']}, k = {control['k_rank']} by ranks")
    if report.failures or not control["refused"]:
        raise VerificationFailure("theorem sweep found counterexamples", report.failures or [{"control": "not refused"}])
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qtanner", description="Quantum Tanner codes on left-right Cayley complexes.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_spec(sp):
        sp.add_argument("--spec", required=True, help="JSON code spec file")
        return sp

    sp = with_spec(sub.add_parser("build", help="write Hx, Hz as alist plus a metadata sidecar"))
    sp.add_argument("--out", required=True, help="output prefix")
    sp.set_defaults(func=cmd_build, format="alist")

    sp = with_spec(sub.add_parser("export", help="like build, choosing the matrix format"))
    sp.add_argument("--out", required=True, help="output prefix")
    sp.add_argument("--format", choices=["alist", "mtx"], default="mtx")
    sp.set_defaults(func=cmd_build)

    sp = with_spec(sub.add_parser("check", help="CSS validity and spec invariants"))
    sp.set_defaults(func=cmd_check)

    sp = with_spec(sub.add_parser("dim", help="n and k of the lifted code"))
    sp.add_argument("--no-audit", action="store_true", help="skip the rank audit of the fast path")
    sp.set_defaults(func=cmd_dim)

    sp = with_spec(sub.add_parser("distance", help="randomized distance upper bound"))
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--side", choices=["x", "z", "both"], default="both")
    sp.add_argument("--target", type=int, default=None, help="stop once the bound is at most this")
    sp.add_argument("--depth", type=int, choices=[1, 2], default=1)
    sp.add_argument("--threads", type=int, default=None)
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("search", help="run or resume a candidate search")
    sp.add_argument("--config", required=True, help="JSON search config")
    sp.add_argument("--resume", action="store_true")
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--out", default=None, help="records file (JSON lines)")
    sp.add_argument("--trials", type=int, default=None, help="override quantum_trials")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--top", type=int, default=20)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("report", help="rank a records file")
    sp.add_argument("records")
    sp.add_argument("--out", default=None, help="write the ranked CSV here")
    sp.add_argument("--verify", action="store_true", help="re-derive k and re-check witnesses")
    sp.add_argument("--top", type=int, default=20)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("verify-lemma", help="sweep base codes against rank and brute force")
    sp.add_argument("--random", type=int, default=200, help="random custom local-code pairs")
    sp.add_argument("--seed", type=int, default=LEMMA_SEED)
    sp.add_argument("--no-distance", action="store_true")
    sp.add_argument("--out", default=None, help="write counterexamples here")
    sp.set_defaults(func=cmd_verify_lemma)

    sp = sub.add_parser("verify-theorem", help="sweep cyclic lifts against rank")
    sp.add_argument("--m-min", type=int, default=2)
    sp.add_argument("--m-max", type=int, default=12)
    sp.add_argument("--pairs", type=int, default=50)
    sp.add_argument("--seed", type=int, default=LEMMA_SEED)
    sp.add_argument("--out", default=None, help="write counterexamples here")
    sp.set_defaults(func=cmd_verify_theorem)

    sp = sub.add_parser("import-check", help="CSS validity of an external Hx/Hz pair")
    sp.add_argument("--hx", required=True, help="alist or .mtx file")
    sp.add_argument("--hz", required=True, help="alist or .mtx file")
    sp.set_defaults(func=cmd_import_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        if exc.counterexample is not None:
            text = json.dumps(exc.counterexample, indent=2, default=str)
            out = getattr(args, "out", None)
            if out and args.command in ("verify-lemma", "verify-theorem"):
                write_text_atomic(out, text + "\n")
                print(f"counterexample written to {out}", file=sys.stderr)
            else:
                print(text, file=sys.stderr)
        return EXIT_VERIFY
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (SpecError, FormatError, GroupDescriptorError, PreconditionError, RefusalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
