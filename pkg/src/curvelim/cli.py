"""Command-line front end.

    curvelim verify [--stage NAME | --script FILE] [--report FILE] ...
    curvelim poly {resultant|groebner|reduce} ...
    curvelim report FILE [--format text|json]

Exit codes: 0 verification success; 1 verification failure (including the
documented-discrepancy verdict); 2 usage or parse error; 3 resource-ceiling
failure.  Reports are always written, even on failure, before a nonzero exit.
``CURVELIM_REPORT_DIR`` sets the default report location.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import List, Optional

from .exactpoly import (
    ParseError,
    PolyError,
    VarTable,
    parse_polynomial,
    resultant,
)
from .ideal import (
    GeneratorSet,
    Limits,
    Relation,
    ResourceExhausted,
    groebner,
    normal_form,
)
from .oracle import DEFAULT_PRIME, SpotCheckConfig, check_certificate
from .pipeline import (
    Config,
    RunResult,
    STAGES,
    ScriptError,
    canonical_digest,
    parse_script,
    run_builtin,
    run_script,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _infer_table(texts: List[str]) -> VarTable:
    """Variables in order of first appearance across all inputs."""
    seen: List[str] = []
    for t in texts:
        for name in _IDENT.findall(t):
            if name not in seen:
                seen.append(name)
    if not seen:
        seen = ["x"]
    return VarTable(seen)


def _parse_all(texts: List[str]) -> List[Polynomial]:
    table = _infer_table(texts)
    return [parse_polynomial(t, table) for t in texts]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curvelim",
                                 description="exact replay of the hypersurface"
                                             " elimination proof")
    sub = ap.add_subparsers(dest="command")

    v = sub.add_parser("verify", help="run the built-in verification or a script")
    v.add_argument("--stage", default=None,
                   help=f"built-in stage: {', '.join(STAGES)} or all (default all)")
    v.add_argument("--script", default=None, help="derivation script file")
    v.add_argument("--report", default=None, help="report path (default report.json"
                                                  " under CURVELIM_REPORT_DIR or cwd)")
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--modulus", type=int, default=DEFAULT_PRIME)
    v.add_argument("--max-basis", type=int, default=4000)
    v.add_argument("--max-pairs", type=int, default=200000)
    v.add_argument("--max-power", type=int, default=8)
    v.add_argument("--canonical", action="store_true",
                   help="zero timings so same-seed runs are byte-identical")
    v.add_argument("--skip-oracle", action="store_true",
                   help="skip the modular spot-check sweep")

    p = sub.add_parser("poly", help="ad-hoc algebra utilities")
    psub = p.add_subparsers(dest="poly_command")
    pr = psub.add_parser("resultant")
    pr.add_argument("p")
    pr.add_argument("q")
    pr.add_argument("var")
    pg = psub.add_parser("groebner")
    pg.add_argument("gens", help="comma-separated generators")
    pd = psub.add_parser("reduce")
    pd.add_argument("p")
    pd.add_argument("divisors", help="comma-separated divisors")
    pd.add_argument("--cofactors", action="store_true")

    r = sub.add_parser("report", help="summarize a report file")
    r.add_argument("path")
    r.add_argument("--format", choices=("text", "json"), default="text")
    return ap


def _report_path(arg: Optional[str]) -> str:
    if arg:
        return arg
    base = os.environ.get("CURVELIM_REPORT_DIR", ".")
    return os.path.join(base, "report.json")


def _attach_spot_checks(result: RunResult, cfg: SpotCheckConfig) -> dict:
    """Run the oracle over every certificate/identity; fold stats into steps."""
    stats = {}
    for s in result.stages:
        for sid, ident in s.identities.items():
            res = check_certificate(ident, cfg=cfg, label=f"{s.name}.{sid}")
            stats[f"{s.name}.{sid}"] = res
            for rec in s.records:
                if rec.sid == sid:
                    rec.details["spot_check"] = res.as_dict()
    return stats


def _render_text(report: dict, out) -> None:
    print(f"engine {report['engine_version']}  seed {report['seed']}"
          f"  verdict {report['verdict']}", file=out)
    for stage in report["stages"]:
        print(f"stage {stage['name']}: {stage['verdict']}"
              f" ({len(stage['steps'])} steps)", file=out)
        for step in stage["steps"]:
            line = f"  {step['id']:34s} {step['status']}"
            if step.get("multiplier_power"):
                line += f"  [multiplier {step.get('multiplier','')}^{step['multiplier_power']}]"
            print(line, file=out)
            if step["status"] == "mismatch-documented":
                for t in step.get("details", {}).get("diff_terms", [])[:8]:
                    print(f"      diff: {t}", file=out)


def cmd_verify(args) -> int:
    config = Config(seed=args.seed, trials=args.trials,
                    max_power=args.max_power,
                    limits=Limits(args.max_basis, args.max_pairs),
                    canonical=args.canonical)
    if args.script and args.stage:
        print("choose either --stage or --script", file=sys.stderr)
        return EXIT_USAGE
    resource_failed = False
    try:
        if args.script:
            try:
                with open(args.script) as f:
                    text = f.read()
            except OSError as exc:
                print(f"cannot read script: {exc}", file=sys.stderr)
                return EXIT_USAGE
            result = run_script(parse_script(text), config)
        else:
            stage = args.stage or "all"
            if stage not in STAGES and stage != "all":
                print(f"unknown stage {stage!r}; choose from"
                      f" {', '.join(STAGES + ('all',))}", file=sys.stderr)
                return EXIT_USAGE
            result = run_builtin(stage, config)
    except ScriptError as exc:
        print(f"script error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceExhausted as exc:
        print(f"resource ceiling: {exc}", file=sys.stderr)
        return EXIT_RESOURCE

    oracle_stats = {}
    if not args.skip_oracle:
        try:
            cfg = SpotCheckConfig(seed=args.seed, trials=args.trials, prime=args.modulus)
        except Exception as exc:
            print(f"bad oracle configuration: {exc}", file=sys.stderr)
            return EXIT_USAGE
        oracle_stats = _attach_spot_checks(result, cfg)

    report = result.report()
    if oracle_stats:
        failures = [k for k, v in oracle_stats.items() if v.verdict != "pass"]
        report["oracle"] = {
            "prime": args.modulus,
            "trials": args.trials,
            "checked": len(oracle_stats),
            "failed": failures,
        }
        if failures and report["verdict"] == "success":
            report["verdict"] = "failure"
        report["canonical_digest"] = canonical_digest(report)

    path = _report_path(args.report)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as f:
        if args.format == "json":
            json.dump(report, f, indent=1, sort_keys=True)
            f.write("\n")
        else:
            _render_text(report, f)
    os.replace(tmp, path)

    _render_text(report, sys.stdout)
    print(f"report written to {path}")
    if any(s["verdict"] == "resource-fail" for s in report["stages"]):
        resource_failed = True
    if resource_failed:
        return EXIT_RESOURCE
    return EXIT_OK if report["verdict"] == "success" else EXIT_VERIFY_FAIL


def cmd_poly(args) -> int:
    try:
        if args.poly_command == "resultant":
            p, q = _parse_all([args.p, args.q])
            if args.var not in p.table:
                print(f"unknown variable {args.var!r}", file=sys.stderr)
                return EXIT_USAGE
            print(resultant(p, q, args.var).to_text())
        elif args.poly_command == "groebner":
            texts = [t.strip() for t in args.gens.split(",") if t.strip()]
            polys = _parse_all(texts)
            gens = GeneratorSet(polys[0].table,
                                [Relation(f"g{i+1}", p) for i, p in enumerate(polys)])
            gb = groebner(gens)
            for line in gb.printed():
                print(line)
        elif args.poly_command == "reduce":
            texts = [args.p] + [t.strip() for t in args.divisors.split(",") if t.strip()]
            polys = _parse_all(texts)
            gens = GeneratorSet(polys[0].table,
                                [Relation(f"g{i}", p) for i, p in enumerate(polys[1:], 1)])
            gb = groebner(gens)
            rem, factors = normal_form(polys[0], gb)
            print(rem.to_text())
            if args.cofactors:
                for bp, cof in zip(gb.polys, factors):
                    if not cof.is_zero():
                        print(f"cofactor[{bp.to_text()}] = {cof.to_text()}")
        else:
            print("poly wants a subcommand: resultant, groebner, reduce",
                  file=sys.stderr)
            return EXIT_USAGE
    except (ParseError, PolyError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceExhausted as exc:
        print(f"resource ceiling: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        with open(args.path) as f:
            report = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read report: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        json.dump(report, sys.stdout, indent=1, sort_keys=True)
        print()
        return EXIT_OK
    steps = sum(len(s.get("steps", [])) for s in report.get("stages", []))
    if steps == 0:
        print("no steps")
        return EXIT_OK
    print(f"engine {report.get('engine_version')}  seed {report.get('seed')}"
          f"  verdict {report.get('verdict')}")
    mismatches = 0
    for stage in report.get("stages", []):
        counts: dict = {}
        for step in stage.get("steps", []):
            counts[step["status"]] = counts.get(step["status"], 0) + 1
        summary = ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()))
        print(f"stage {stage['name']}: {stage.get('verdict')} ({summary})")
        for step in stage.get("steps", []):
            if step["status"] == "mismatch-documented":
                mismatches += 1
                print(f"  mismatch {step['id']} ({step.get('citation', '')}):")
                for t in step.get("details", {}).get("diff_terms", [])[:6]:
                    print(f"    diff {t}")
    print(f"mismatches: {mismatches}")
    print("certificate digests:")
    for stage in report.get("stages", []):
        for step in stage.get("steps", []):
            if step.get("certificate_digest"):
                print(f"  {stage['name']}.{step['id']}: {step['certificate_digest'][:16]}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "poly":
        return cmd_poly(args)
    if args.command == "report":
        return cmd_report(args)
    ap.print_help()
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
