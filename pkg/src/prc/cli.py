"""Command line interface.

Subcommands:
  verify      run a verification scenario (or all of them)
  height      height of a rule-defined stream in a model ring
  invariants  (e, f, n) of a tower given as JSON

Exit codes: 0 everything passed, 1 a check failed, 2 something was undecided.
"""

from __future__ import annotations

import argparse
import json
import sys

from .insep_algebra import invariants, tower_from_json
from .model_ring import ModelRing, rule_from_json
from .pradical import DEFAULT_HEIGHT_BOUND, height
from .scenarios import (
    SCENARIO_NAMES,
    ParamOutOfRange,
    Report,
    ScenarioParams,
    UnknownScenario,
    run_scenario,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_UNKNOWN = 2


def _print_report(report: Report, fmt: str):
    if fmt == "json":
        print(json.dumps(report.to_dict(), indent=2))
        return
    print(f"scenario {report.scenario} ({report.runtime_ms} ms)")
    for check in report.checks:
        line = f"  [{check.status:7s}] {check.name}"
        if check.witness:
            line += f"  -- {check.witness}"
        print(line)
    print(f"overall: {report.overall}")


def _cmd_verify(args) -> int:
    params = ScenarioParams(
        p=args.p,
        mu=args.mu,
        nu=args.nu,
        precision=args.precision,
        depth=args.depth,
        seed=args.seed,
    )
    names = list(SCENARIO_NAMES) if args.scenario == "all" else [args.scenario]
    worst = EXIT_PASS
    for name in names:
        try:
            report = run_scenario(name, params)
        except (UnknownScenario, ParamOutOfRange) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        _print_report(report, args.format)
        if report.overall == "fail":
            worst = EXIT_FAIL
        elif report.overall == "unknown" and worst == EXIT_PASS:
            worst = EXIT_UNKNOWN
    return worst


def _cmd_height(args) -> int:
    ring = ModelRing(args.p, args.mu)
    rule = rule_from_json(json.loads(args.rule), args.p)
    result = height(rule, ring, bound=args.bound)
    payload = {
        "status": result.status,
        "nu": result.nu,
        "bound": result.bound,
        "evidence": [
            {"nu": nu, "verdict": verdict.status, "note": verdict.note}
            for nu, verdict in result.evidence
        ],
    }
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(f"height: {result}")
        for item in payload["evidence"]:
            print(f"  nu={item['nu']}: {item['verdict']} {item['note']}")
    if result.status == "unknown":
        return EXIT_UNKNOWN
    return EXIT_PASS


def _cmd_invariants(args) -> int:
    tower = tower_from_json(json.loads(args.tower))
    triple = invariants(tower)
    payload = {"e": triple.e, "f": triple.f, "n": triple.n}
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print(f"e={triple.e} f={triple.f} n={triple.n}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prc",
        description="Exact verification kernel for p-radical closures of "
        "characteristic-p model rings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a verification scenario")
    verify.add_argument(
        "--scenario", default="all", choices=list(SCENARIO_NAMES) + ["all"]
    )
    verify.add_argument("--p", type=int, default=2)
    verify.add_argument("--mu", type=int, default=1)
    verify.add_argument("--nu", type=int, default=1)
    verify.add_argument("--depth", type=int, default=3)
    verify.add_argument("--precision", type=int, default=64)
    verify.add_argument("--seed", type=int, default=42)
    verify.add_argument("--format", choices=["json", "text"], default="text")
    verify.set_defaults(func=_cmd_verify)

    height_p = sub.add_parser("height", help="height of a stream in R_mu")
    height_p.add_argument("--rule", required=True, help="rule JSON")
    height_p.add_argument("--p", type=int, default=2)
    height_p.add_argument("--mu", type=int, default=1)
    height_p.add_argument("--bound", type=int, default=DEFAULT_HEIGHT_BOUND)
    height_p.add_argument("--format", choices=["json", "text"], default="text")
    height_p.set_defaults(func=_cmd_height)

    inv = sub.add_parser("invariants", help="numerical invariants of a tower")
    inv.add_argument("--tower", required=True, help="tower JSON")
    inv.add_argument("--format", choices=["json", "text"], default="text")
    inv.set_defaults(func=_cmd_invariants)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
