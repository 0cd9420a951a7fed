"""Command-line front end.

Subcommands: eval, sat, valid, check-proof, fuzz, axioms.  Exit codes:
0 for a positive outcome (true / SAT / VALID / OK / zero failures),
1 for a negative outcome, 2 for usage errors, 3 for input errors
(unparsable formulas, trace or proof files, closure cap), 4 for internal
invariant violations.  All diagnostics go to stderr; --json emits one
machine-readable object on stdout with fixed key order.
"""

from __future__ import annotations

import argparse
import json
import sys

from .fuzz import GenConfig, cross_check_campaign, soundness_campaign
from .proof import (
    ProofError, ProofFormatError, SYSTEM_IDS, check_proof, list_axioms,
    parse_proof,
)
from .semantics import EvalError, eval_caret, eval_ltl
from .syntax import Not, ParseError, parse_formula, print_formula
from .tableau import CLASSES, ClosureCapError, decide_sat
from .trace import TraceFormatError, parse_trace, trace_to_text

__all__ = ["main"]


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload))
    elif text:
        print(text)


def _cap(args) -> int | None:
    if args.cap is None:
        return 24
    return None if args.cap == 0 else args.cap


def _cmd_eval(args) -> int:
    formula = parse_formula(args.formula, args.mode)
    with open(args.trace, encoding="utf-8") as fh:
        trace = parse_trace(fh.read())
    if args.mode == "caret":
        value = eval_caret(trace, args.pos, formula)
    else:
        value = eval_ltl(trace, args.pos, formula)
    verdict = "true" if value else "false"
    _emit(args, {"command": "eval", "verdict": verdict}, verdict)
    return 0 if value else 1


def _cmd_sat(args) -> int:
    formula = parse_formula(args.formula, "ltl")
    result = decide_sat(formula, args.cls, closure_cap=_cap(args))
    if result.satisfiable:
        witness = trace_to_text(result.model)
        _emit(args, {"command": "sat", "verdict": "sat", "witness": witness},
              "SAT\n" + witness)
        return 0
    _emit(args, {"command": "sat", "verdict": "unsat"}, "UNSAT")
    return 1


def _cmd_valid(args) -> int:
    formula = parse_formula(args.formula, "ltl")
    result = decide_sat(Not(formula), args.cls, closure_cap=_cap(args))
    if not result.satisfiable:
        _emit(args, {"command": "valid", "verdict": "valid"}, "VALID")
        return 0
    counter = trace_to_text(result.model)
    _emit(args, {"command": "valid", "verdict": "invalid", "witness": counter},
          "INVALID\n" + counter)
    return 1


def _cmd_check_proof(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        script = parse_proof(fh.read())
    verdict = check_proof(script)
    if verdict.ok:
        _emit(args, {"command": "check-proof", "verdict": "ok"}, "OK")
        return 0
    report = {"step": verdict.step, "reason": verdict.reason}
    _emit(args, {"command": "check-proof", "verdict": "failed",
                 "report": report},
          f"FAIL step {verdict.step}: {verdict.reason}")
    return 1


def _report_payload(report) -> dict:
    payload = {"counts": {name: count for name, count in report.counts},
               "failures": report.failures}
    if report.first_failure is not None:
        formula, trace, pos = report.first_failure
        payload["first_failure"] = {
            "formula": print_formula(formula),
            "trace": trace_to_text(trace) if trace is not None else None,
            "position": pos,
        }
    return payload


def _report_text(report) -> str:
    lines = [f"schema {name}: {count} instances" for name, count in report.counts]
    lines.append(f"failures: {report.failures}")
    if report.first_failure is not None:
        formula, trace, pos = report.first_failure
        lines.append("first failure:")
        lines.append(f"  formula: {print_formula(formula)}")
        if trace is not None:
            lines.append("  trace:")
            lines.extend("    " + ln for ln in trace_to_text(trace).splitlines())
        lines.append(f"  position: {pos}")
    return "\n".join(lines)


def _cmd_fuzz(args) -> int:
    cfg = GenConfig(seed=args.seed)
    if args.system == "cross-check":
        report = cross_check_campaign(args.instances, cfg)
    else:
        report = soundness_campaign(args.system, args.instances, cfg)
    verdict = "ok" if report.failures == 0 else "failures"
    _emit(args, {"command": "fuzz", "verdict": verdict,
                 "report": _report_payload(report)},
          _report_text(report))
    return 0 if report.failures == 0 else 1


def _cmd_axioms(args) -> int:
    rows = list_axioms(args.system)
    text = "\n".join(f"{name}: {template}" for name, template in rows)
    _emit(args, {"command": "axioms", "verdict": "ok",
                 "report": {"system": args.system, "axioms": [list(r) for r in rows]}},
          text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caretkit",
        description="temporal logic toolkit: evaluate, decide, check proofs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a formula on a trace file")
    p.add_argument("--formula", required=True)
    p.add_argument("--trace", required=True, help="trace file path")
    p.add_argument("--pos", type=int, default=0)
    p.add_argument("--mode", choices=("ltl", "caret"), default="ltl")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sat", help="decide satisfiability, print a witness")
    p.add_argument("--formula", required=True)
    p.add_argument("--class", dest="cls", required=True, choices=CLASSES)
    p.add_argument("--cap", type=int, default=None,
                   help="closure size cap (0 lifts the cap; default 24)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_sat)

    p = sub.add_parser("valid", help="decide validity, print a countermodel")
    p.add_argument("--formula", required=True)
    p.add_argument("--class", dest="cls", required=True, choices=CLASSES)
    p.add_argument("--cap", type=int, default=None,
                   help="closure size cap (0 lifts the cap; default 24)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_valid)

    p = sub.add_parser("check-proof", help="check a proof script file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_check_proof)

    p = sub.add_parser("fuzz", help="run a soundness or cross-check campaign")
    p.add_argument("--system", required=True,
                   choices=SYSTEM_IDS + ("cross-check",))
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_fuzz)

    p = sub.add_parser("axioms", help="list a system's schemas and rules")
    p.add_argument("--system", required=True, choices=SYSTEM_IDS)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_axioms)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, TraceFormatError, ProofFormatError, EvalError,
            ClosureCapError, ProofError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except AssertionError as e:
        print(f"internal error: invariant violated ({e})", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
