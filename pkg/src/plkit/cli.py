"""Command-line surface: validate, solve, optimize, consequences, compile,
match, serve.

Results go to stdout, conflict trails and load errors to stderr. Exit
codes: 0 ok, 1 validation errors, 2 unsatisfiable, 3 usage error, 4 I/O
error. All output is deterministic: configurations print their features
sorted alphabetically, line order follows solver order.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from . import modelio, session as session_mod, solver, validator
from .compiler import compile_model, dump_system, render_constraint
from .matcher import match as match_requirements
from .model import InvalidModelError, PartialConfiguration
from .rational import format_rational, parse_rational

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_UNSAT = 2
EXIT_USAGE = 3
EXIT_IO = 4

_BOUND_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_-]*)(<=|>=)(.+)$")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def format_score(score) -> str:
    if isinstance(score, Fraction):
        return format_rational(score)
    return f"{score:.12g}"


def format_conflict(conflict) -> list:
    if conflict is None:
        return ["unsat: no configuration extends the given decisions"]
    if conflict.violated is None:
        lines = [f"conflict: {conflict.provenance}"]
    else:
        lines = [f"conflict: {conflict.provenance} ({render_constraint(conflict.violated)})"]
    for entry in conflict.trail:
        lines.append(f"  {entry.feature} = {entry.value}  ({entry.reason})")
    return lines


def _print_conflict(conflict) -> None:
    for line in format_conflict(conflict):
        print(line, file=sys.stderr)


def _read_document(path: str) -> modelio.SourceDocument:
    try:
        return modelio.SourceDocument.from_path(path)
    except OSError as exc:
        raise exc


def _load_model(path: str):
    doc = _read_document(path)
    return modelio.parse_model(doc)


def _build_partial(model, select, exclude) -> PartialConfiguration:
    unknown = [f for f in (select or []) + (exclude or []) if f not in model.feature_set]
    if unknown:
        raise _UsageError(f"unknown feature(s): {' '.join(unknown)}")
    return PartialConfiguration(frozenset(select or []), frozenset(exclude or []))


def _config_line(configuration) -> str:
    return " ".join(sorted(configuration))


def cmd_validate(args) -> int:
    doc = _read_document(args.model)
    try:
        draft, _ = modelio.parse_draft(doc)
    except modelio.ParseError as exc:
        print(f"ERROR PARSE : {exc}")
        return EXIT_VALIDATION
    _, diagnostics = validator.validate_draft(draft)
    for d in diagnostics:
        print(d.line())
    return EXIT_VALIDATION if validator.has_errors(diagnostics) else EXIT_OK


def cmd_solve(args) -> int:
    model = _load_model(args.model)
    system = compile_model(model)
    partial = _build_partial(model, args.select, args.exclude)
    if args.count:
        print(solver.count(system, partial))
        return EXIT_OK
    if args.first:
        outcome = solver.first_solution(system, partial)
        if isinstance(outcome, solver.Unsat):
            _print_conflict(outcome.conflict)
            return EXIT_UNSAT
        print(_config_line(outcome))
        return EXIT_OK
    limit = args.limit if args.limit is not None else None
    cursor = solver.iterate(system, partial)
    found = 0
    while limit is None or found < limit:
        solution = cursor.next_solution()
        if solution is None:
            break
        print(_config_line(solution))
        found += 1
    if found == 0:
        _print_conflict(cursor.last_conflict)
        return EXIT_UNSAT
    return EXIT_OK


def _apply_bounds(system, bounds) -> None:
    for spec_text in bounds or []:
        m = _BOUND_RE.match(spec_text)
        if not m:
            raise _UsageError(f"bad bound {spec_text!r}; expected attr<=value or attr>=value")
        attribute, op, value_text = m.groups()
        try:
            bound = parse_rational(value_text)
        except ValueError:
            raise _UsageError(f"bad bound value {value_text!r}") from None
        solver.add_attribute_bound(system, attribute, op, bound)


def cmd_optimize(args) -> int:
    model = _load_model(args.model)
    system = compile_model(model)
    partial = _build_partial(model, args.select, args.exclude)
    _apply_bounds(system, args.bound)
    direction = "maximize" if args.max else "minimize"
    objective = solver.Objective.from_model(model, args.attr, direction)
    outcome = solver.optimize(system, partial, objective)
    if isinstance(outcome, solver.Unsat):
        _print_conflict(outcome.conflict)
        return EXIT_UNSAT
    configuration, value = outcome
    print(f"{_config_line(configuration)} | {args.attr} = {format_rational(value)}")
    return EXIT_OK


def cmd_consequences(args) -> int:
    model = _load_model(args.model)
    system = compile_model(model)
    partial = _build_partial(model, args.select, args.exclude)
    result = solver.consequences(system, partial, depth=args.depth)
    if result.status == "conflict":
        _print_conflict(result.conflict)
        return EXIT_UNSAT

    def block(label, features):
        body = " ".join(sorted(features))
        print(f"{label}: {body}" if body else f"{label}:")

    block("in", result.forced_in)
    block("out", result.forced_out)
    block("open", result.open)
    return EXIT_OK


def cmd_compile(args) -> int:
    model = _load_model(args.model)
    system = compile_model(model)
    for line in dump_system(system).lines:
        print(line)
    return EXIT_OK


def cmd_match(args) -> int:
    model = _load_model(args.model)
    requirements = modelio.parse_requirements(_read_document(args.reqs))
    if args.lexicon:
        lexicon = modelio.parse_lexicon(_read_document(args.lexicon))
    else:
        lexicon = modelio.parse_lexicon(modelio.SourceDocument((), "<defaults>"))
    threshold = parse_rational(args.threshold)
    gap = parse_rational(args.gap)
    report = match_requirements(requirements, model, lexicon, args.metric, threshold, gap)
    print(f"# metric={report.metric} a={format_rational(report.a)} b={format_rational(report.b)}"
          f" threshold={format_rational(report.threshold)} gap={format_rational(report.gap)}")
    for entry in report.sorted_entries():
        if entry.score > 0:
            print(f"{entry.requirement} {entry.feature} {entry.metric} {format_score(entry.score)}")
    for rid in sorted(report.classification):
        c = report.classification[rid]
        if c.kind == "matched":
            print(f"{rid} -> matched {c.features[0]}")
        elif c.kind == "ambiguous":
            print(f"{rid} -> ambiguous " + " ".join(c.features))
        else:
            print(f"{rid} -> unmatched (capitalization candidate)")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(models_dir=args.models)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    except (OSError, SystemExit) as exc:
        if isinstance(exc, SystemExit) and not exc.code:
            return EXIT_OK
        print(f"cannot serve on port {args.port}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="plkit", description="Product-line derivation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_cmd(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("model", help="model file")
        p.set_defaults(func=func)
        return p

    add_model_cmd("validate", cmd_validate, "run the model validity battery")

    p = add_model_cmd("solve", cmd_solve, "enumerate configurations")
    p.add_argument("--select", action="append", metavar="FEATURE")
    p.add_argument("--exclude", action="append", metavar="FEATURE")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--first", action="store_true")
    mode.add_argument("--all", action="store_true")
    mode.add_argument("--count", action="store_true")
    mode.add_argument("--limit", type=int, metavar="N")

    p = add_model_cmd("optimize", cmd_optimize, "optimal configuration for an attribute")
    p.add_argument("--attr", required=True)
    direction = p.add_mutually_exclusive_group()
    direction.add_argument("--min", action="store_true")
    direction.add_argument("--max", action="store_true")
    p.add_argument("--select", action="append", metavar="FEATURE")
    p.add_argument("--exclude", action="append", metavar="FEATURE")
    p.add_argument("--bound", action="append", metavar="ATTR<=V")

    p = add_model_cmd("consequences", cmd_consequences, "forced and open features")
    p.add_argument("--select", action="append", metavar="FEATURE")
    p.add_argument("--exclude", action="append", metavar="FEATURE")
    p.add_argument("--depth", choices=("propagation", "probing"), default="probing")

    add_model_cmd("compile", cmd_compile, "dump the 0-1 constraint system")

    p = add_model_cmd("match", cmd_match, "match stakeholder requirements to features")
    p.add_argument("--reqs", required=True, help="requirements file")
    p.add_argument("--lexicon", help="lexicon file")
    p.add_argument("--metric", choices=("dice", "jaccard", "cosine"), default="dice")
    p.add_argument("--threshold", default="0.5")
    p.add_argument("--gap", default="0.1")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8431)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--models", help="directory of model files to preload")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "first", False) is False and hasattr(args, "first"):
        # solve defaults to --first when no mode flag is given
        if not (args.all or args.count or args.limit is not None):
            args.first = True
    try:
        return args.func(args)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (modelio.ParseError, InvalidModelError) as exc:
        print(f"invalid model: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except session_mod.SessionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
