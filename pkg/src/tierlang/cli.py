"""Command-line front end.

Commands: check, run, forcheck, ops, desugar.  File extensions select the
pipeline (.tl first-order, .tl2 second-order); --second-order overrides.
Every command can emit a machine-readable report with --json (schema in
report.schema.json at the repository root); exit codes are a function of
the report.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import interp1, opreg, parser, safety1, secondorder, words
from .syntax import Program1, Program2

ENV_BUDGET = "TIERLANG_MAX_STEPS"

EXIT_OK = 0
EXIT_NEGATIVE = 1  # unsafe / criterion rejected
EXIT_FRONTEND = 2  # parse or guardedness errors
EXIT_STOPPED = 3  # execution ended in a RuntimeStop
EXIT_IO = 4


def blank_report(command: str, file: str | None = None) -> dict:
    return {
        "command": command,
        "file": file,
        "verdicts": {
            "parse": None,
            "guarded": None,
            "simple_type": None,
            "safety": None,
            "for_program": None,
            "aperiodic": None,
            "ran": None,
        },
        "gamma": None,
        "loop_levels": None,
        "omega": None,
        "program_type": None,
        "result": None,
        "stats": None,
        "stop": None,
        "explanation": None,
        "operators": None,
        "validation": None,
        "exit_code": EXIT_OK,
    }


def exit_code_for(report: dict) -> int:
    """Exit codes are a pure function of the report."""
    v = report["verdicts"]
    if v["parse"] is False or v["guarded"] is False:
        return EXIT_FRONTEND
    if report["stop"] is not None:
        return EXIT_STOPPED
    cmd = report["command"]
    if cmd == "check":
        if v["simple_type"] is False or v["safety"] is False:
            return EXIT_NEGATIVE
        return EXIT_OK
    if cmd == "forcheck":
        if v["for_program"] and v["safety"]:
            return EXIT_OK
        return EXIT_NEGATIVE
    if cmd == "ops":
        if report["validation"] and report["validation"]["counterexamples"]:
            return EXIT_NEGATIVE
        return EXIT_OK
    return EXIT_OK


def emit(report: dict, as_json: bool, lines: list) -> int:
    report["exit_code"] = exit_code_for(report)
    if as_json:
        print(json.dumps(report, indent=2))
    else:
        for line in lines:
            print(line)
    return report["exit_code"]


def load_program(path: str, second_order: bool | None, registry):
    if second_order is None:
        second_order = path.endswith(".tl2")
    program = parser.parse_file(path, registry=registry)
    if second_order and isinstance(program, Program1):
        raise parser.ParseError(f"{path}: expected a second-order program")
    return program


def default_budget() -> int:
    value = os.environ.get(ENV_BUDGET)
    if value:
        return int(value)
    return interp1.DEFAULT_BUDGET


def load_config(path: str | None) -> opreg.DeltaConfig | None:
    if path is None:
        return None
    with open(path, "r", encoding="utf-8") as fh:
        return opreg.DeltaConfig.from_json(json.load(fh))


def parse_input_word(text: str) -> str:
    if text and text[0] == "u" and text[1:].isdigit():
        return words.unary(int(text[1:]))
    return words.word(text)


# ---------------------------------------------------------------------------
# Commands


def cmd_check(args) -> int:
    registry = opreg.builtin_registry()
    report = blank_report("check", args.file)
    lines = []
    try:
        config = load_config(args.delta)
        program = load_program(args.file, args.second_order or None, registry)
    except OSError as exc:
        report["explanation"] = str(exc)
        report["exit_code"] = EXIT_IO
        print(json.dumps(report, indent=2) if args.json else f"error: {exc}")
        return EXIT_IO
    except (parser.ParseError, parser.DesugarError, words.WordError) as exc:
        report["verdicts"]["parse"] = False
        report["explanation"] = str(exc)
        return emit(report, args.json, [f"parse error: {exc}"])
    report["verdicts"]["parse"] = True
    if isinstance(program, Program2):
        result = secondorder.infer_safety2(program, registry, config)
        report["verdicts"]["guarded"] = result.stage != "guardedness"
        report["verdicts"]["simple_type"] = (
            None if result.stage == "guardedness" else result.stage != "simple-type"
        )
        report["verdicts"]["safety"] = result.safe
        report["explanation"] = result.explanation
        details = result.report()
        report["omega"] = details["omega"]
        report["program_type"] = details["program_type"]
        lines.append(
            "safe" if result.safe else f"unsafe ({result.stage}): {result.explanation}"
        )
        if result.safe:
            for name, entry in details["omega"].items():
                lines.append(f"  {name}: level {entry['level']}, gamma {entry['gamma']}")
    else:
        result = safety1.infer_safety(program, registry, config)
        report["verdicts"]["safety"] = result.safe
        details = result.report()
        report["gamma"] = details["gamma"]
        report["loop_levels"] = details["loop_levels"]
        report["explanation"] = result.explanation
        if result.safe:
            lines.append(f"safe; gamma {details['gamma']}")
            lines.append(f"loop levels {details['loop_levels']}")
        else:
            lines.append(f"unsafe: {result.explanation}")
    return emit(report, args.json, lines)


def _stop_details(exc: interp1.RuntimeStop) -> dict:
    stop = {"kind": exc.subcode, "message": str(exc)}
    if isinstance(exc, interp1.AperiodicityViolation):
        stop["loop_id"] = exc.loop_id
        stop["iteration"] = exc.iteration
        stop["witness"] = exc.witness
    return stop


def cmd_run(args) -> int:
    registry = opreg.builtin_registry()
    report = blank_report("run", args.file)
    lines = []
    budget = args.max_steps if args.max_steps is not None else default_budget()
    try:
        program = load_program(args.file, args.second_order or None, registry)
        inputs = {}
        for item in args.input or []:
            if "=" not in item:
                raise ValueError(f"--input expects name=word, got {item!r}")
            name, _, value = item.partition("=")
            inputs[name] = parse_input_word(value)
        oracles = {}
        for item in args.oracle or []:
            if "=" not in item:
                raise ValueError(f"--oracle expects Name=spec, got {item!r}")
            name, _, spec = item.partition("=")
            oracles[name] = secondorder.make_oracle(spec, registry)
    except OSError as exc:
        report["explanation"] = str(exc)
        report["exit_code"] = EXIT_IO
        print(json.dumps(report, indent=2) if args.json else f"error: {exc}")
        return EXIT_IO
    except (parser.ParseError, parser.DesugarError) as exc:
        report["verdicts"]["parse"] = False
        report["explanation"] = str(exc)
        return emit(report, args.json, [f"parse error: {exc}"])
    except (words.WordError, ValueError, secondorder.OracleFailure) as exc:
        report["explanation"] = str(exc)
        report["exit_code"] = EXIT_IO
        print(json.dumps(report, indent=2) if args.json else f"error: {exc}")
        return EXIT_IO
    report["verdicts"]["parse"] = True

    param_names = (
        program.params if isinstance(program, Program1) else program.boxed_words
    )
    values = []
    for name in param_names:
        if name not in inputs:
            print(f"warning: input {name} missing, defaulting to eps", file=sys.stderr)
        values.append(inputs.get(name, words.EPSILON))
    try:
        if isinstance(program, Program1):
            result, stats = interp1.run_program(
                program, values, registry, budget, args.monitor
            )
        else:
            result, stats = secondorder.eval_program2(
                program, oracles, values, registry, budget, args.monitor
            )
        report["verdicts"]["ran"] = True
        if args.monitor:
            report["verdicts"]["aperiodic"] = True
        report["result"] = result
        report["stats"] = stats.as_dict()
        lines.append(f'result: "{result}"')
        lines.append(f"steps: {stats.steps}")
        for loop, count in sorted(stats.loop_iterations.items()):
            lines.append(f"loop {loop}: {count} iteration(s)")
        if args.monitor:
            lines.append("aperiodicity: no violation")
    except interp1.RuntimeStop as exc:
        report["verdicts"]["ran"] = False
        report["stop"] = _stop_details(exc)
        if isinstance(exc, interp1.AperiodicityViolation):
            report["verdicts"]["aperiodic"] = False
        if exc.stats is not None:
            report["stats"] = exc.stats.as_dict()
        lines.append(f"stopped ({exc.subcode}): {exc}")
    return emit(report, args.json, lines)


def cmd_forcheck(args) -> int:
    registry = opreg.builtin_registry()
    report = blank_report("forcheck", args.file)
    lines = []
    try:
        program = parser.parse_file(args.file, registry=registry)
    except OSError as exc:
        report["explanation"] = str(exc)
        report["exit_code"] = EXIT_IO
        print(json.dumps(report, indent=2) if args.json else f"error: {exc}")
        return EXIT_IO
    except (parser.ParseError, parser.DesugarError) as exc:
        report["verdicts"]["parse"] = False
        report["explanation"] = str(exc)
        return emit(report, args.json, [f"parse error: {exc}"])
    report["verdicts"]["parse"] = True
    if not isinstance(program, Program1):
        report["verdicts"]["for_program"] = False
        report["explanation"] = "the for criterion applies to first-order programs"
        return emit(report, args.json, ["rejected: not a first-order program"])
    all_for = safety1.check_for_program(program)
    report["verdicts"]["for_program"] = all_for
    if all_for:
        result = safety1.infer_safety(program, registry)
        report["verdicts"]["safety"] = result.safe
        details = result.report()
        report["gamma"] = details["gamma"]
        report["loop_levels"] = details["loop_levels"]
        report["explanation"] = result.explanation
        lines.append("accepted" if result.safe else f"rejected: {result.explanation}")
    else:
        lines.append("rejected: contains a loop that is not a for loop")
    return emit(report, args.json, lines)


def cmd_ops(args) -> int:
    registry = opreg.builtin_registry()
    report = blank_report("ops")
    report["verdicts"]["parse"] = True
    listing = [opreg.describe_entry(e) for e in registry]
    report["operators"] = listing
    lines = [
        f"{info['name']}/{info['arity']}: {info['class']}"
        + (f" (+{info['growth']})" if "growth" in info else "")
        + (f" (degree {info['degree']})" if "degree" in info else "")
        for info in listing
    ]
    if args.validate:
        reports = opreg.validate_registry(registry, args.validate, seed=args.seed)
        cexs = [
            {
                "op": c.op,
                "inputs": list(c.inputs),
                "output": c.output,
                "reason": c.reason,
            }
            for r in reports
            for c in r.counterexamples
        ]
        report["validation"] = {"samples": args.validate, "counterexamples": cexs}
        lines.append(
            f"validation: {args.validate} samples per operator, "
            f"{len(cexs)} counterexample(s)"
        )
        for c in cexs:
            lines.append(f"  {c['op']}{tuple(c['inputs'])} -> {c['output']!r}: {c['reason']}")
    return emit(report, args.json, lines)


def cmd_desugar(args) -> int:
    registry = opreg.builtin_registry()
    try:
        program = parser.parse_file(args.file, registry=registry)
    except OSError as exc:
        print(f"error: {exc}")
        return EXIT_IO
    except (parser.ParseError, parser.DesugarError) as exc:
        print(f"parse error: {exc}")
        return EXIT_FRONTEND
    print(parser.pretty_print(program), end="")
    return EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tierlang",
        description="Safety inference, execution, and aperiodicity monitoring "
        "for the tiered toy languages.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="infer safety (exit 0 safe, 1 unsafe)")
    p.add_argument("file")
    p.add_argument("--second-order", action="store_true")
    p.add_argument("--delta", help="JSON file restricting admissible operator levels")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("run", help="execute a program")
    p.add_argument("file")
    p.add_argument("--input", action="append", metavar="NAME=WORD")
    p.add_argument("--oracle", action="append", metavar="NAME=SPEC")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--monitor", action="store_true", help="stop on periodic loop states")
    p.add_argument("--second-order", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser(
        "forcheck", help="accept only safe programs whose loops are all for loops"
    )
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_forcheck)

    p = sub.add_parser("ops", help="list the operator registry")
    p.add_argument("--validate", type=int, metavar="N", default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_ops)

    p = sub.add_parser("desugar", help="print the desugared program")
    p.add_argument("file")
    p.set_defaults(fn=cmd_desugar)
    return ap


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
