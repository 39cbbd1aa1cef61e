"""Command line front end: analyze, transform, compare, check, dot.

Reports go to stdout, diagnostics to stderr. Exit codes: 0 on success or
PASS, 1 on a failed check or comparison, 2 on usage or parse errors. All
output is deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from .analysis import run_acs
from .classic import classic_transform
from .dataflow import AnalysisResult, format_facts
from .ir import (
    ParseError,
    Program,
    Var,
    format_operand,
    natural_key,
    parse_program,
    print_program,
    to_dot,
    variables,
)
from .oracle import (
    CyclicGraphError,
    GenParams,
    Verdict,
    differential_check,
    mop_in,
    random_program,
    solve_round_robin,
)
from .propagate import SLOT_ORDER, Replacement, resolve, transform, transform_to_fixpoint


def _load(path: str) -> Program:
    return parse_program(Path(path).read_text())


def cmd_analyze(args: argparse.Namespace) -> int:
    result = run_acs(_load(args.file))
    for label in sorted(result.reachable, key=natural_key):
        print(f"{label}: IN = {format_facts(result.in_sets[label])}")
        if args.out_sets:
            print(f"{label}: OUT = {format_facts(result.out_sets[label])}")
    return 0


def cmd_transform(args: argparse.Namespace) -> int:
    prog = _load(args.file)
    if args.iterate is not None:
        if args.iterate < 1:
            args.parser.error("--iterate must be at least 1")
        prog, report = transform_to_fixpoint(prog, args.iterate)
    else:
        prog, report = transform(prog, run_acs(prog))
    sys.stdout.write(print_program(prog))
    if args.report:
        print(f"# passes: {report.pass_count}")
        if not report.converged:
            print("# not-converged")
        for r in report.replacements:
            print(f"# {r.block} {r.position}: {r.original} -> {format_operand(r.replacement)} (chain {r.chain_length})")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    prog = _load(args.file)
    result = run_acs(prog)
    classic_reps = classic_transform(prog)[1].replacements
    unified_reps = transform(prog, result)[1].replacements
    print(f"classic={len(classic_reps)} unified={len(unified_reps)}")
    by_site: dict[tuple[str, str], dict[str, Replacement]] = {}
    for kind, reps in (("classic", classic_reps), ("unified", unified_reps)):
        for r in reps:
            by_site.setdefault((r.block, r.position), {})[kind] = r
    for block, position in sorted(by_site, key=lambda s: (natural_key(s[0]), SLOT_ORDER.index(s[1]))):
        site = by_site[(block, position)]
        var = next(iter(site.values())).original
        c = format_operand(site["classic"].replacement) if "classic" in site else "-"
        u = format_operand(site["unified"].replacement) if "unified" in site else "-"
        print(f"{block} {position} {var}: classic={c} unified={u}")
    for (block, position), site in sorted(by_site.items()):
        if "classic" not in site:
            continue
        if "unified" not in site:
            print(f"error: classic rewrote {block} {position} but unified did not", file=sys.stderr)
            return 1
        c, u = site["classic"].replacement, site["unified"].replacement
        expected = resolve(c.name, result.in_sets[block]) if isinstance(c, Var) else c
        if u != expected:
            print(f"error: {block} {position} resolves past the unified result", file=sys.stderr)
            return 1
    return 0


def _random_envs(rng: random.Random, prog: Program, count: int) -> list[dict[str, int]]:
    names = sorted(variables(prog))
    return [{name: rng.randint(-64, 64) for name in names} for _ in range(count)]


def _same_solution(a: AnalysisResult, b: AnalysisResult) -> bool:
    # iteration counters differ by construction, everything else must agree
    return a.in_sets == b.in_sets and a.out_sets == b.out_sets and a.reachable == b.reachable


def _mop_agrees(prog: Program) -> bool:
    result = run_acs(prog)
    return all(mop_in(prog, label) == result.in_sets[label] for label in result.reachable)


def _dump_failure(kind: str, prog: Program, verdict: Verdict) -> None:
    print(f"{kind}: FAIL")
    if verdict.reason:
        print(f"reason: {verdict.reason}")
    print("program:")
    sys.stdout.write(print_program(prog))
    if verdict.env is not None:
        print("env:")
        for name in sorted(verdict.env):
            print(f"{name}={verdict.env[name]}")
    if verdict.step is not None:
        print(f"step: {verdict.step}")
    print("FAIL")


def _check_one(prog: Program, envs: list[dict[str, int]], args: argparse.Namespace) -> tuple[str, Verdict] | None:
    """Returns (check name, verdict) for the first failure, else None."""
    for rounds in (1, 10):
        verdict = differential_check(prog, envs, args.fuel, rounds=rounds, check_facts=rounds == 1)
        if not verdict.ok:
            return "differential", verdict
    if not _same_solution(run_acs(prog), solve_round_robin(prog)):
        return "solver-agreement", Verdict(False, "worklist and round-robin fixpoints differ")
    return None


def cmd_check(args: argparse.Namespace) -> int:
    if args.fuzz and args.file:
        args.parser.error("give a file or --fuzz, not both")
    if not args.fuzz and not args.file:
        args.parser.error("a file or --fuzz is required")
    if args.programs < 1:
        args.parser.error("--programs must be at least 1")
    if args.inputs < 1:
        args.parser.error("--inputs must be at least 1")
    rng = random.Random(args.seed)

    if args.fuzz:
        print(f"fuzz: programs={args.programs} inputs={args.inputs} seed={args.seed}")
        programs = [random_program(GenParams(seed=rng.randrange(2**32))) for _ in range(args.programs)]
    else:
        programs = [_load(args.file)]

    mop_checked = 0
    for prog in programs:
        envs = _random_envs(rng, prog, args.inputs)
        failure = _check_one(prog, envs, args)
        if failure is not None:
            _dump_failure(failure[0], prog, failure[1])
            return 1
        if args.acyclic_mop:
            try:
                agrees = _mop_agrees(prog)
            except CyclicGraphError:
                continue
            mop_checked += 1
            if not agrees:
                _dump_failure("mop", prog, Verdict(False, "path meet differs from fixpoint"))
                return 1
    print("differential: PASS")
    print("solver-agreement: PASS")
    if args.acyclic_mop:
        if args.fuzz:
            print(f"mop: PASS (checked={mop_checked})")
        elif mop_checked:
            print("mop: PASS")
        else:
            print("mop: SKIP (cyclic-cfg)")
    print("PASS")
    return 0


def cmd_dot(args: argparse.Namespace) -> int:
    prog = _load(args.file)
    if args.transformed:
        prog = transform(prog, run_acs(prog))[0]
    annotations = None
    if args.annotate:
        result = run_acs(prog)
        annotations = {label: format_facts(result.in_sets[label]) for label in result.reachable}
    sys.stdout.write(to_dot(prog, annotations))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copyprop",
        description="Copy and constant propagation over single-statement CFGs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="print the available copy pairs per block")
    p.add_argument("file")
    p.add_argument("--out-sets", action="store_true", help="also print OUT sets")
    p.set_defaults(func=cmd_analyze, parser=p)

    p = sub.add_parser("transform", help="propagate copies and print the program")
    p.add_argument("file")
    p.add_argument("--iterate", type=int, metavar="N", help="reanalyze and rewrite up to N rounds")
    p.add_argument("--report", action="store_true", help="append replacement lines as comments")
    p.set_defaults(func=cmd_transform, parser=p)

    p = sub.add_parser("compare", help="count baseline vs unified replacements")
    p.add_argument("file")
    p.set_defaults(func=cmd_compare, parser=p)

    p = sub.add_parser("check", help="differential and solver checks")
    p.add_argument("file", nargs="?")
    p.add_argument("--fuzz", action="store_true", help="check generated programs instead of a file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--programs", type=int, default=100, help="fuzz program count")
    p.add_argument("--inputs", type=int, default=5, help="random inputs per program")
    p.add_argument("--fuel", type=int, default=10000, help="interpreter step budget")
    p.add_argument("--acyclic-mop", action="store_true", help="also compare against meet-over-paths")
    p.set_defaults(func=cmd_check, parser=p)

    p = sub.add_parser("dot", help="emit the control flow graph as Graphviz text")
    p.add_argument("file")
    p.add_argument("--annotate", action="store_true", help="embed IN sets in node labels")
    p.add_argument("--transformed", action="store_true", help="render the rewritten program")
    p.set_defaults(func=cmd_dot, parser=p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
