"""Command-line surface.

Exit codes: 0 = success / property holds, 1 = property violated (witness on
stdout), 2 = input or capacity error.  Identical invocations produce
byte-identical output.  ``--jobs`` (fallback: the MATCHGAME_JOBS environment
variable) is accepted on every subcommand; scans are deterministic and their
output never depends on it.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .choice import check_all
from .da import da_firm_proposing, da_worker_proposing
from .documents import (
    emit_market,
    parse_full_profile,
    parse_market,
    parse_workers_profile,
    serialize_matching,
)
from .errors import MatchgameError
from .games import (
    FIRM_OPTIMAL,
    LEXICOGRAPHIC,
    WORKER_OPTIMAL,
    FullGameProfile,
    StableRule,
    WorkersGameProfile,
    is_nash_full_game,
    is_nash_workers_game,
    rural_hospital_check,
    verify_theorem1,
    verify_theorem2,
)
from .generate import FAMILIES, random_market
from .search import (
    search_firms_strategic_stable_failure,
    search_non_lad_rural_violation,
)
from .stability import ir_set, stable_set

_RULES = {
    "firm-opt": FIRM_OPTIMAL,
    "worker-opt": WORKER_OPTIMAL,
    "lex": LEXICOGRAPHIC,
}


def _read_market(path: str):
    return parse_market(Path(path).read_text())


def _resolve_jobs(args) -> int:
    jobs = args.jobs
    if jobs is None:
        env = os.environ.get("MATCHGAME_JOBS", "").strip()
        jobs = int(env) if env else 1
    if jobs < 1:
        raise MatchgameError(f"--jobs must be >= 1, got {jobs}")
    return jobs


def _cmd_check_choice(args) -> int:
    market = _read_market(args.market)
    all_ok = True
    for f in market.firms:
        for law, (ok, witness) in check_all(market.choice(f)).items():
            if ok:
                print(f"{f} {law}: ok")
            else:
                all_ok = False
                print(f"{f} {law}: VIOLATION {witness.describe()}")
    return 0 if all_ok else 1


def _cmd_da(args) -> int:
    market = _read_market(args.market)
    run = da_worker_proposing if args.side == "worker" else da_firm_proposing
    if args.trace:
        matching, trace = run(market, trace=True)
        for i, rnd in enumerate(trace.rounds):
            verb = "proposals" if trace.side == "worker" else "offers"
            fmt = lambda d: " ".join(
                f"{f}:{{{','.join(sorted(ws))}}}" for f, ws in sorted(d.items())
            )
            print(f"round {i + 1} {verb}: {fmt(rnd.proposals)}")
            print(f"round {i + 1} holdings: {fmt(rnd.holdings)}")
            print(f"round {i + 1} rejections: {fmt(rnd.rejections)}")
    else:
        matching = run(market)
    print(serialize_matching(matching))
    return 0


def _cmd_stable_set(args) -> int:
    market = _read_market(args.market)
    matchings = stable_set(market)
    print(f"stable matchings: {len(matchings)}")
    for m in matchings:
        print(serialize_matching(m))
    return 0


def _cmd_ir_set(args) -> int:
    market = _read_market(args.market)
    matchings = ir_set(market)
    print(f"individually rational matchings: {len(matchings)}")
    for m in matchings:
        print(serialize_matching(m))
    return 0


def _cmd_nash(args) -> int:
    market = _read_market(args.market)
    text = Path(args.profile).read_text()
    if args.game == "full":
        prefs, choices = parse_full_profile(text, market)
        profile = FullGameProfile(preferences=prefs, choices=choices)
        rule = StableRule(_RULES[args.rule])
        report = is_nash_full_game(rule, market, profile)
    else:
        prefs = parse_workers_profile(text, market)
        profile = WorkersGameProfile(preferences=prefs)
        report = is_nash_workers_game(market, profile)
    if report.is_equilibrium:
        print(f"equilibrium: yes ({report.deviations_checked} deviations checked)")
        return 0
    print("equilibrium: no")
    print(f"witness: {report.witness.describe()}")
    return 1


def _cmd_verify_theorem1(args) -> int:
    market = _read_market(args.market)
    rule = StableRule(_RULES[args.rule])
    report = verify_theorem1(market, rule, seed=args.seed)
    mode = "exhaustive" if report.exhaustive else "sampled"
    print(
        f"clause (i) [{mode}]: {'ok' if report.clause_i.ok else 'VIOLATED'} "
        f"({report.clause_i.checked} profiles, "
        f"{report.equilibrium_count} equilibria)"
    )
    if not report.clause_i.ok:
        print(f"  {report.clause_i.detail}")
    print(
        f"clause (ii): {'ok' if report.clause_ii.ok else 'VIOLATED'} "
        f"({report.ir_count} individually rational matchings)"
    )
    if not report.clause_ii.ok:
        print(f"  {report.clause_ii.detail}")
    if report.outcome_set_equals_ir is not None:
        verdict = "=" if report.outcome_set_equals_ir else "!="
        print(f"equilibrium outcomes {verdict} individually rational set")
    return 0 if report.ok else 1


def _cmd_verify_theorem2(args) -> int:
    market = _read_market(args.market)
    report = verify_theorem2(market)
    print(
        f"clause (i): {'ok' if report.clause_i.ok else 'VIOLATED'} "
        f"({report.profiles_total} profiles, {report.equilibrium_count} equilibria)"
    )
    if not report.clause_i.ok:
        print(f"  {report.clause_i.detail}")
    print(
        f"clause (ii): {'ok' if report.clause_ii.ok else 'VIOLATED'} "
        f"({report.stable_count} stable matchings)"
    )
    if not report.clause_ii.ok:
        print(f"  {report.clause_ii.detail}")
    if report.outcome_set_equals_stable:
        print(f"equilibrium outcomes = stable set ({report.stable_count} matchings)")
    else:
        print("equilibrium outcomes != stable set")
    return 0 if report.ok else 1


def _cmd_rural_hospital(args) -> int:
    market = _read_market(args.market)
    ok, witness = rural_hospital_check(market)
    count = len(stable_set(market))
    if ok:
        print(f"rural hospital property holds ({count} stable matchings)")
        return 0
    print("rural hospital property VIOLATED")
    print(
        f"witness: {witness.agent} has {witness.count_a} partner(s) in "
        f"{serialize_matching(witness.matching_a)} but {witness.count_b} in "
        f"{serialize_matching(witness.matching_b)}"
    )
    return 1


def _cmd_random(args) -> int:
    market = random_market(args.seed, args.workers, args.firms, args.family)
    sys.stdout.write(emit_market(market))
    return 0


def _cmd_search(args) -> int:
    if args.target == "non-lad-rural-violation":
        result = search_non_lad_rural_violation(args.seed, args.budget)
        if result is None:
            print(f"no violation found within {args.budget} markets")
            return 1
        print(f"found after {result.trials} markets (seed {result.market_seed}):")
        sys.stdout.write(emit_market(result.market))
        w = result.witness
        print(
            f"witness: {w.agent} has {w.count_a} partner(s) in "
            f"{serialize_matching(w.matching_a)} but {w.count_b} in "
            f"{serialize_matching(w.matching_b)}"
        )
        return 0
    result = search_firms_strategic_stable_failure(args.seed, args.budget)
    if result is None:
        print(f"no failure found within {args.budget} markets")
        return 1
    print(f"found after {result.trials} markets (seed {result.market_seed}):")
    sys.stdout.write(emit_market(result.market))
    print("equilibrium firm strategies:")
    for f in sorted(result.profile):
        print(f"  {f}: {result.profile[f].document()}")
    print(f"unstable outcome: {serialize_matching(result.outcome)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchgame",
        description="Many-to-one matching markets with substitutable choice "
        "functions: stability oracles, deferred acceptance, and exhaustive "
        "Nash-implementation analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        p.add_argument("--jobs", type=int, default=None, help="parallelism hint")
        return p

    p = add("check-choice", _cmd_check_choice, help="run all four choice-law checkers")
    p.add_argument("market")

    p = add("da", _cmd_da, help="run deferred acceptance")
    p.add_argument("market")
    p.add_argument("--side", choices=("worker", "firm"), required=True)
    p.add_argument("--trace", action="store_true")

    p = add("stable-set", _cmd_stable_set, help="enumerate all stable matchings")
    p.add_argument("market")

    p = add("ir-set", _cmd_ir_set, help="enumerate all individually rational matchings")
    p.add_argument("market")

    p = add("nash", _cmd_nash, help="check a strategy profile for equilibrium")
    p.add_argument("market")
    p.add_argument("--profile", required=True)
    p.add_argument("--game", choices=("full", "workers"), required=True)
    p.add_argument("--rule", choices=tuple(_RULES), default="firm-opt")

    p = add("verify-theorem1", _cmd_verify_theorem1,
            help="full game implements the individually rational set")
    p.add_argument("market")
    p.add_argument("--rule", choices=tuple(_RULES), required=True)
    p.add_argument("--seed", type=int, default=0, help="seed for sampled clause (i)")

    p = add("verify-theorem2", _cmd_verify_theorem2,
            help="workers game implements the stable set under LAD")
    p.add_argument("market")

    p = add("rural-hospital", _cmd_rural_hospital,
            help="equal partner counts across the stable set")
    p.add_argument("market")

    p = add("random", _cmd_random, help="generate a seeded random market")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, required=True)
    p.add_argument("--firms", type=int, required=True)
    p.add_argument("--family", choices=FAMILIES, required=True)

    p = add("search", _cmd_search, help="seeded counterexample search")
    p.add_argument(
        "--target",
        choices=("non-lad-rural-violation", "firms-strategic-stable-failure"),
        required=True,
    )
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--budget", type=int, required=True)

    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _resolve_jobs(args)
        return args.func(args)
    except MatchgameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
