"""Command line front end.

Exit status: 0 pass, 1 negative verdict, 2 input error, 3 unknown or over
capacity.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import geometry
from .discrimination import DiscriminationInstance, common_probe_set_distinguishable, pairwise_distinguishable
from .errors import CapacityError, LocmarkError, ScenarioError
from .marking import locally_distinguishable, mark_check, theorem2_criteria
from .probes import DEFAULT_SEED, ProbeModel
from .report import Report, emit_report, jsonable
from .scenario import load_scenario
from .verify import SECTIONS, run_verify_suite

EXIT_PASS, EXIT_NEGATIVE, EXIT_INPUT, EXIT_UNKNOWN = 0, 1, 2, 3
_OUTCOME_EXIT = {"yes": EXIT_PASS, True: EXIT_PASS, "no": EXIT_NEGATIVE, False: EXIT_NEGATIVE,
                 "unknown": EXIT_UNKNOWN, None: EXIT_UNKNOWN}


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable JSON report")
    common.add_argument("--tol", type=_positive, help="hull tolerance (default %(default)s)", default=None)
    common.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="random seed (default 0xC0FFEE)")
    common.add_argument("--max-rounds", type=int, default=None, help="visits allowed per party")

    parser = argparse.ArgumentParser(prog="locmark", description="Local discrimination and marking of product unitaries.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-pair", parents=[common], help="global and local tests for two unitaries")
    p.add_argument("file")
    p = sub.add_parser("check-set", parents=[common], help="LOCC discrimination of a set")
    p.add_argument("file")
    p.add_argument("--probe-model", choices=["single", "product", "ancilla"], default=None)
    p = sub.add_parser("mark", parents=[common], help="r-markability of a set")
    p.add_argument("file")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--probe-model", choices=["single", "product", "ancilla"], default=None)
    p = sub.add_parser("verify", parents=[common], help="run built-in reproductions")
    p.add_argument("ids", nargs="*", default=["all"], metavar="id", help=f"one of {', '.join(SECTIONS)} or all")
    return parser


def _model(args, scenario) -> ProbeModel:
    if getattr(args, "probe_model", None):
        return ProbeModel.parse(args.probe_model)
    return scenario.probe_model


def _rounds(args, scenario) -> int:
    value = args.max_rounds or scenario.params.get("max_rounds", 1)
    if value < 1:
        raise ScenarioError("max rounds must be at least 1", "--max-rounds")
    return value


def cmd_check_pair(args, report: Report) -> int:
    s = load_scenario(args.file)
    report.scenario_digest = s.digest()
    if len(s.unitaries) != 2:
        raise ScenarioError(f"check-pair needs exactly two unitaries, got {len(s.unitaries)}", "$.unitaries")
    u, v = s.unitaries
    hull = pairwise_distinguishable(u, v)
    report.add(f"distinguishable {u.label} vs {v.label}", hull.contains_origin,
               f"min hull norm {hull.min_norm:.6g}", hull.to_json())
    if len(u.parties) == 2:
        crit = theorem2_criteria(u, v)
        report.add("markable (closed form)", crit["markable"],
                   f"marking party {crit['marking_party'] or '-'}", crit)
    m = mark_check([u, v], 2, _model(args, s), max_rounds=_rounds(args, s), user_probes=s.probes, seed=args.seed)
    sv = next(iter(m.per_subset.values()))
    report.add("markable (strategy search)", sv.outcome, sv.reason, sv.to_json())
    return _OUTCOME_EXIT[hull.contains_origin]


def cmd_check_set(args, report: Report) -> int:
    s = load_scenario(args.file)
    report.scenario_digest = s.digest()
    model = _model(args, s)
    us = s.unitaries
    for i in range(len(us)):
        for j in range(i + 1, len(us)):
            h = pairwise_distinguishable(us[i], us[j])
            report.add(f"pair {us[i].label} vs {us[j].label}", h.contains_origin,
                       f"min hull norm {h.min_norm:.6g}", h.to_json())
    if len(us) >= 2:
        g = common_probe_set_distinguishable(DiscriminationInstance(us, model), seed=args.seed)
        report.add(f"global common probe ({model.value})", g.feasible, g.kind, g.to_json())
    v = locally_distinguishable(us, model, max_rounds=_rounds(args, s), user_probes=s.probes, seed=args.seed)
    report.add(f"LOCC distinguishable ({model.value})", v.outcome, v.reason, v.to_json())
    return _OUTCOME_EXIT[v.outcome]


def cmd_mark(args, report: Report) -> int:
    s = load_scenario(args.file)
    report.scenario_digest = s.digest()
    r = args.r if args.r is not None else s.params.get("r")
    if r is None:
        raise ScenarioError("no r given (use --r or params.r)", "$.params.r")
    m = mark_check(s.unitaries, r, _model(args, s), max_rounds=_rounds(args, s), user_probes=s.probes,
                   seed=args.seed)
    for labels, v in m.per_subset.items():
        report.add(f"subset {{{', '.join(labels)}}}", v.outcome, v.reason, v.to_json())
    failing = f"failing subset {{{', '.join(m.failing_subset)}}}" if m.failing_subset else ""
    report.add(f"{r}-markable", m.markable, failing)
    return _OUTCOME_EXIT[m.markable]


def cmd_verify(args, report: Report) -> int:
    sections = run_verify_suite(args.ids, seed=args.seed)
    ok = True
    for sec in sections:
        for c in sec["checks"]:
            report.add(f"[{sec['id']}] {c['name']}", "pass" if c["passed"] else "fail", c["summary"],
                       c.get("certificate"), passed=c["passed"])
        ok = ok and sec["passed"]
    return EXIT_PASS if ok else EXIT_NEGATIVE


COMMANDS = {"check-pair": cmd_check_pair, "check-set": cmd_check_set, "mark": cmd_mark, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is not None:
        geometry.EPS_HULL = args.tol
    words = list(argv) if argv is not None else sys.argv[1:]
    report = Report(command=" ".join(words), seed=args.seed)
    start = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, report)
    except CapacityError as exc:
        print(f"locmark: capacity: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    except LocmarkError as exc:
        print(f"locmark: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report.elapsed = time.perf_counter() - start
    report.verdicts = jsonable(report.verdicts)
    print(emit_report(report, "machine" if args.json else "human"))
    return code


if __name__ == "__main__":
    sys.exit(main())
