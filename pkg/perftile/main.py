# main.py

import argparse
import sys
import traceback
from typing import Optional

from perftile.codes import Code, code_from_tiling, code_stats, formula_check, verify_perfect
from perftile.errors import PerftileError
from perftile.gf import field_new
from perftile.projgeo import Factorization, counting_identity, exhaustive_search, verify_factorization
from perftile.schemas.report import CheckResult, SearchSummary, StatsReport
from perftile.settings import get_settings
from perftile.tiling import (
    Tiling,
    construct_projective,
    construct_semiprojective,
    pieces_disjoint,
    projective_pieces,
    semiprojective_pieces,
    tiling_checklist,
    verify_tiling,
)
from perftile.utils.report_builder import Timings, object_stats
from perftile.utils.tile_io import read_pair, read_set, write_set, write_solutions

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ERROR = 2

# ----------------------------
# 0. 로그 출력
# ----------------------------

_verbose = False


def banner(title: str, rows: Optional[dict] = None) -> None:
    """진행 상황을 stderr 에 찍는다. stdout 은 JSON 보고서 전용."""
    if not _verbose:
        return
    print(f"\n===== [{title}] =====", file=sys.stderr)
    for key, value in (rows or {}).items():
        print(f"{key:<13}: {value}", file=sys.stderr)
    print("=" * (len(title) + 14) + "\n", file=sys.stderr)


# ----------------------------
# 1. 인자 파싱
# ----------------------------

def _assume(raw: str) -> int:
    """--assume q=<q>"""
    key, _, value = raw.partition("=")
    if key.strip() != "q" or not value.strip().isdigit():
        raise argparse.ArgumentTypeError("expected q=<field order>")
    return int(value)


def _sizes(raw: str) -> tuple[int, int]:
    parts = raw.split(",")
    if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
        raise argparse.ArgumentTypeError("expected a,b")
    return int(parts[0]), int(parts[1])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker 수 (기본: PERFTILE_THREADS)")
    common.add_argument("--report", default=None, help="보고서를 이 파일에도 쓴다")
    common.add_argument("--timings", action="store_true", help="단계별 시간을 보고서에 넣는다")
    common.add_argument("--verbose", action="store_true", help="stderr 에 진행 배너 출력")

    parser = argparse.ArgumentParser(prog="perftile", description="tilings of F_q^n and 1-perfect codes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a tiling of F_q^{2m}")
    p.add_argument("--theorem", type=int, choices=(1, 2), required=True,
                   help="1: semiprojective (m >= 3), 2: projective (m >= 5)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out-u", default=None)
    p.add_argument("--out-v", default=None)

    p = sub.add_parser("verify", parents=[common], help="verify a tiling, a perfect code or a factorization")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--u", default=None)
    target.add_argument("--code", default=None)
    target.add_argument("--factorization", nargs=2, metavar=("U_POINTS", "V_POINTS"), default=None)
    p.add_argument("--v", default=None)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--assume", type=_assume, default=None, metavar="q=<q>")
    p.add_argument("--geometry", choices=("projective", "affine"), default="projective")
    p.add_argument("--skip-invariants", action="store_true", help="rank 외의 불변량(period/kernel) 생략")

    p = sub.add_parser("to-code", parents=[common], help="turn a semiprojective tiling into a 1-perfect code")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--method", choices=("enumerate", "solve"), default="enumerate")

    p = sub.add_parser("search", parents=[common], help="exhaustive factorization search")
    p.add_argument("--geometry", choices=("projective", "affine"), required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sizes", type=_sizes, required=True, metavar="a,b")
    p.add_argument("--first-only", action="store_true")
    p.add_argument("--max-points", type=int, default=None)
    p.add_argument("--allow-large", action="store_true", help="점 개수 ceiling 무시 (오래 걸림)")
    p.add_argument("--fix-first", action="store_true", help="첫 점을 U 에 고정 (동형류 대표만)")
    p.add_argument("--out", default=None)

    p = sub.add_parser("stats", parents=[common], help="rank / kernel / periods of a code file")
    p.add_argument("--code", required=True)
    p.add_argument("--assume", type=_assume, default=None, metavar="q=<q>")
    p.add_argument("--expect-rank", type=int, default=None)
    p.add_argument("--expect-kernel", type=int, default=None)

    return parser


# ----------------------------
# 2. 명령
# ----------------------------

def surgery_check(field, m: int, theorem: int) -> CheckResult:
    """H_{i,γ} 끼리, U_{i,γ} 끼리 서로소인지 조각을 다시 만들어 확인한다."""
    pieces = semiprojective_pieces(field, m) if theorem == 1 else projective_pieces(field, m)
    overlap = pieces_disjoint(pieces)
    if overlap is None:
        removed = sum(len(p.removed) for p in pieces)
        return CheckResult(
            name="surgery pieces disjoint", passed=True, detail=f"{len(pieces)} pieces, {removed} vectors moved"
        )
    side, a, b = overlap
    return CheckResult(
        name="surgery pieces disjoint",
        passed=False,
        detail=f"{side} pieces (i={a.i}, γ={a.gamma}) and (i={b.i}, γ={b.gamma}) overlap",
    )


def cmd_construct(args, timings: Timings) -> StatsReport:
    field = field_new(args.p, args.k)
    banner("Construct", {"theorem": args.theorem, "field": field.describe(), "m": args.m})

    with timings.step("construct"):
        if args.theorem == 1:
            tiling = construct_semiprojective(field, args.m)
        else:
            tiling = construct_projective(field, args.m)

    outputs = {}
    if args.out_u:
        outputs["u"] = str(write_set(args.out_u, tiling.U, "tile"))
    if args.out_v:
        outputs["v"] = str(write_set(args.out_v, tiling.V, "tile"))

    with timings.step("verify"):
        verdict = verify_tiling(tiling, threads=args.threads)
    with timings.step("checklist"):
        checks = tiling_checklist(
            tiling, require_projective_v=args.theorem == 2, threads=args.threads, verdict=verdict
        )
        checks.append(surgery_check(field, args.m, args.theorem))
    with timings.step("stats"):
        objects = {
            "U": object_stats(tiling.U, "tile", threads=args.threads),
            "V": object_stats(tiling.V, "tile", threads=args.threads),
        }

    for c in checks:
        banner("Check", {"name": c.name, "passed": c.passed, "detail": c.detail})

    return StatsReport(
        command="construct",
        ok=all(c.passed for c in checks) and verdict.valid,
        objects=objects,
        checks=checks,
        tiling=verdict,
        outputs=outputs,
    )


def cmd_verify(args, timings: Timings) -> StatsReport:
    invariants = not args.skip_invariants

    if args.u is not None:
        if args.v is None:
            raise PerftileError("--u needs --v")
        header, u, v = read_pair(args.u, args.v)
        tiling = Tiling(u.field, header.n, u, v, meta={"u": args.u, "v": args.v})
        with timings.step("verify"):
            verdict = verify_tiling(tiling, threads=args.threads)
        banner("Tiling Verdict", {"valid": verdict.valid, "summary": verdict.summary()})
        with timings.step("stats"):
            objects = {
                "U": object_stats(u, "tile", threads=args.threads, invariants=invariants),
                "V": object_stats(v, "tile", threads=args.threads, invariants=invariants),
            }
        return StatsReport(command="verify", ok=verdict.valid, objects=objects, tiling=verdict)

    if args.code is not None:
        header, words = read_set(args.code, assume_q=args.assume)
        code = Code(words.field, header.n, words, meta={"path": args.code})
        with timings.step("verify"):
            verdict = verify_perfect(code, args.radius, threads=args.threads)
        banner("Perfect Code Verdict", {"valid": verdict.valid, "summary": verdict.summary()})
        with timings.step("stats"):
            objects = {"C": object_stats(words, "code", threads=args.threads, invariants=invariants)}
        return StatsReport(command="verify", ok=verdict.valid, objects=objects, perfect=verdict)

    path_u, path_v = args.factorization
    header, u, v = read_pair(path_u, path_v)
    fact = Factorization(args.geometry, u.field, header.n, u, v, meta={"u": path_u, "v": path_v})
    with timings.step("verify"):
        verdict = verify_factorization(fact)
    banner("Factorization Verdict", {"valid": verdict.valid, "summary": verdict.summary()})
    objects = {"U": object_stats(u, "points"), "V": object_stats(v, "points")}
    return StatsReport(command="verify", ok=verdict.valid, objects=objects, factorization=verdict)


def cmd_to_code(args, timings: Timings) -> StatsReport:
    header, u, v = read_pair(args.u, args.v)
    tiling = Tiling(u.field, header.n, u, v, meta={"u": args.u, "v": args.v})

    with timings.step("code_from_tiling"):
        code = code_from_tiling(tiling, method=args.method, threads=args.threads)
    banner("Code", {"length N": code.N, "|C|": len(code), "method": args.method})

    outputs = {}
    if args.out:
        outputs["code"] = str(write_set(args.out, code.words, "code"))

    with timings.step("verify_perfect"):
        perfect = verify_perfect(code, 1, threads=args.threads)
    with timings.step("code_stats"):
        stats = code_stats(code, threads=args.threads)
    with timings.step("formula_check"):
        formulas = formula_check(tiling, code, stats=stats, threads=args.threads)

    for f in formulas:
        banner("Formula", {"quantity": f.quantity, "predicted": f.predicted, "measured": f.measured})

    objects = {
        "C": object_stats(code.words, "code", invariants=False).model_copy(
            update={"kernel_dim": stats.kernel_dim, "period_count": stats.period_count}
        )
    }
    return StatsReport(
        command="to-code",
        ok=perfect.valid and all(f.consistent for f in formulas),
        objects=objects,
        perfect=perfect,
        formulas=formulas,
        outputs=outputs,
        notes=[f"length N = {code.N}"],
    )


def cmd_search(args, timings: Timings) -> StatsReport:
    field = field_new(args.p, args.k)
    a, b = args.sizes
    lhs, rhs = counting_identity(args.geometry, field.q, args.n, a, b)
    banner("Search", {"geometry": args.geometry, "field": field.describe(), "n": args.n,
                      "sizes": f"{a},{b}", "identity": f"{lhs} vs {rhs}"})

    with timings.step("search"):
        found = exhaustive_search(
            args.geometry,
            field,
            args.n,
            (a, b),
            first_only=args.first_only,
            max_points=args.max_points,
            allow_large=args.allow_large,
            fix_first=args.fix_first,
            threads=args.threads,
        )

    with timings.step("verify"):
        verdicts = [verify_factorization(f) for f in found]

    outputs = {}
    if args.out:
        outputs["solutions"] = str(
            write_solutions(args.out, args.geometry, field, args.n, [(f.U, f.V) for f in found])
        )

    summary = SearchSummary(
        geometry=args.geometry,
        q=field.q,
        n=args.n,
        size_u=a,
        size_v=b,
        identity_lhs=lhs,
        identity_rhs=rhs,
        point_count=rhs,
        first_only=args.first_only,
        fix_first=args.fix_first,
        solutions=len(found),
        degenerate_solutions=sum(1 for v in verdicts if v.degenerate),
    )
    checks = [CheckResult(
        name="solutions verify",
        passed=all(v.valid for v in verdicts),
        detail=f"{sum(v.valid for v in verdicts)} of {len(verdicts)}",
    )]
    return StatsReport(command="search", ok=checks[0].passed, checks=checks, search=summary, outputs=outputs)


def cmd_stats(args, timings: Timings) -> StatsReport:
    header, words = read_set(args.code, assume_q=args.assume)
    with timings.step("stats"):
        stats = object_stats(words, "code", threads=args.threads)
    banner("Stats", {"q": stats.q, "n": stats.n, "size": stats.size,
                     "rank": stats.rank, "kernel_dim": stats.kernel_dim})

    checks = []
    if args.expect_rank is not None:
        checks.append(CheckResult(name="rank", passed=stats.rank == args.expect_rank,
                                  detail=f"expected {args.expect_rank}, got {stats.rank}"))
    if args.expect_kernel is not None:
        checks.append(CheckResult(name="kernel_dim", passed=stats.kernel_dim == args.expect_kernel,
                                  detail=f"expected {args.expect_kernel}, got {stats.kernel_dim}"))
    return StatsReport(command="stats", ok=all(c.passed for c in checks), objects={"C": stats}, checks=checks)


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "to-code": cmd_to_code,
    "search": cmd_search,
    "stats": cmd_stats,
}


# ----------------------------
# 3. 진입점
# ----------------------------

def main(argv: Optional[list[str]] = None) -> int:
    global _verbose
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = get_settings()
        _verbose = args.verbose or settings.verbose
        if args.threads is None:
            args.threads = settings.threads

        timings = Timings(args.timings)
        report = COMMANDS[args.command](args, timings)
        report.timings = timings.report()

        text = report.to_json()
        if args.report:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        print(text)

        for c in report.failed_checks():
            print(f"check failed: {c.name} ({c.detail})", file=sys.stderr)
        return EXIT_OK if report.ok else EXIT_INVALID

    except PerftileError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception:
        print("❌ [ERROR] unexpected exception", file=sys.stderr)
        traceback.print_exc()
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
